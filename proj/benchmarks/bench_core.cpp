#include <benchmark/benchmark.h>

#include "ddfmcw/analysis.hpp"
#include "ddfmcw/channel.hpp"
#include "ddfmcw/chirp.hpp"
#include "ddfmcw/detection.hpp"
#include "ddfmcw/modem.hpp"
#include "ddfmcw/rng.hpp"
#include "ddfmcw/sensing.hpp"

using namespace ddfmcw;

namespace {

struct Scene {
  SystemParams p = desk_params();
  PulseBank pb{p};
  Pilot pilot = make_pilot(p, PilotKind::dd_srn_fmcw, 0.2);
  std::vector<PathParams> paths;
  DDFrame data;

  Scene() {
    Rng rng(11);
    paths = sample_channel(rng, 4, p.l_max, 5.0).paths;
    const Constellation c = make_constellation("qam4");
    data = DDFrame::zeros(p.M, p.N, FrameRole::data);
    for (int n = 1; n < p.N; ++n)
      for (int m = 0; m < p.M; ++m) data.grid(m, n) = c.points[rng() % c.points.size()];
  }
};

const Scene& scene() {
  static const Scene s;
  return s;
}

void BM_Synthesis(benchmark::State& st) {
  const Scene& s = scene();
  const TimeSampleVector x = oddm_modulate(s.data);
  for (auto _ : st) benchmark::DoNotOptimize(synthesize_waveform(x, s.p, s.pb, true));
}
BENCHMARK(BM_Synthesis)->Unit(benchmark::kMillisecond);

void BM_DdResponse(benchmark::State& st) {
  const Scene& s = scene();
  for (auto _ : st) benchmark::DoNotOptimize(dd_response(s.data, s.paths, s.p, s.pb));
}
BENCHMARK(BM_DdResponse)->Unit(benchmark::kMillisecond);

void BM_AtomUncached(benchmark::State& st) {
  const Scene& s = scene();
  const AtomDictionary atoms(s.pilot, s.p, s.pb);
  double l = 3.0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(atoms.compute(l, -1.37));
    l += 1.0 / 1024.0;
  }
}
BENCHMARK(BM_AtomUncached)->Unit(benchmark::kMicrosecond);

void BM_Omp(benchmark::State& st) {
  const Scene& s = scene();
  const DDFrame Y = dd_response(pilot_frame(s.pilot, s.p.N), s.paths, s.p, s.pb);
  SensingConfig cfg;
  for (auto _ : st) {
    AtomDictionary atoms(s.pilot, s.p, s.pb);
    benchmark::DoNotOptimize(omp_grid_evolution(Y, atoms, cfg));
  }
}
BENCHMARK(BM_Omp)->Unit(benchmark::kMillisecond);

void BM_SicSweep(benchmark::State& st) {
  const Scene& s = scene();
  const EffectiveChannel G = build_effective_channel(s.paths, s.p, s.pb);
  const CVec r = G.apply(oddm_modulate(s.data));
  const DetectorSetup setup =
      data_detector_setup(s.p, make_constellation("qam4"), 1.0, CMat::Zero(s.p.M, s.p.N));
  for (auto _ : st) {
    SymbolBeliefs b = initial_beliefs(setup, s.p.M, s.p.N);
    benchmark::DoNotOptimize(sic_mmse_sweep(b, r, G, 0.05, setup));
  }
}
BENCHMARK(BM_SicSweep)->Unit(benchmark::kMillisecond);

void BM_AmbiguitySurface(benchmark::State& st) {
  const SystemParams p = make_params(32, 32, 66.67e-6, 5e9, 0.15, 20, 8, 16);
  const PulseBank pb(p);
  const TimeSampleVector x = oddm_modulate(build_pilot_frame(p, PilotKind::dd_srn_fmcw, 1.0));
  const Waveform tx = synthesize_waveform(x, pb, p.O, {p.M, p.M});
  const Waveform ref = synthesize_waveform(x, pb, p.O, {});
  const long half = static_cast<long>(p.M) * p.O / 2;
  const int nfft = good_fft_size(static_cast<int>(4 * ref.samples.size()));
  for (auto _ : st) benchmark::DoNotOptimize(ambiguity_numeric(tx, ref, -half, half, 4, nfft, 0.5 / p.M));
}
BENCHMARK(BM_AmbiguitySurface)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
