#include <gtest/gtest.h>

#include "ddfmcw/channel.hpp"
#include "ddfmcw/chirp.hpp"
#include "ddfmcw/modem.hpp"
#include "oracles.hpp"

using namespace ddfmcw;

TEST(Modem, ModulateMatchesDirectDft) {
  Rng rng(1);
  for (auto [M, N] : {std::pair{16, 8}, std::pair{6, 5}, std::pair{2, 1}}) {
    const CMat X = oracle::random_frame(rng, M, N);
    const CVec s = oddm_modulate(DDFrame(X, FrameRole::data));
    EXPECT_LE((s - oracle::modulate(X)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Modem, ZeroFrameAndParseval) {
  Rng rng(2);
  EXPECT_EQ(oddm_modulate(DDFrame::zeros(8, 4, FrameRole::data)).cwiseAbs().maxCoeff(), 0.0);
  const CMat X = oracle::random_frame(rng, 32, 16);
  const CVec s = oddm_modulate(DDFrame(X, FrameRole::data));
  EXPECT_NEAR(s.squaredNorm() / X.squaredNorm(), 1.0, 1e-12);
}

TEST(Modem, PilotFrameIsRepeatedChirpTrain) {
  const SystemParams p = desk_params();
  const double Ec = 0.4;
  const CVec s = oddm_modulate(build_pilot_frame(p, PilotKind::dd_srn_fmcw, Ec));
  const CVec c = make_chirp(p.M).values;
  for (int nd = 0; nd < p.N; ++nd)
    for (int m = 0; m < p.M; ++m) EXPECT_LE(std::abs(s[nd * p.M + m] - std::sqrt(Ec) * c[m]), 1e-12);
}

TEST(Modem, DemodulateInvertsModulate) {
  Rng rng(3);
  for (auto [M, N] : {std::pair{16, 8}, std::pair{64, 16}, std::pair{10, 3}}) {
    const CMat X = oracle::random_frame(rng, M, N);
    const DDFrame Y = oddm_demodulate(oddm_modulate(DDFrame(X, FrameRole::data)), M, N);
    EXPECT_LE(oracle::max_abs(Y.grid - X), 1e-12);
  }
  EXPECT_THROW(oddm_demodulate(CVec::Zero(10), 4, 4), std::invalid_argument);
}

TEST(Modem, TimeImpulseSpreadsOverDoppler) {
  CVec r = CVec::Zero(8 * 4);
  r[0] = 1.0;
  const DDFrame Y = oddm_demodulate(r, 8, 4);
  for (int n = 0; n < 4; ++n) EXPECT_LE(std::abs(Y.grid(0, n) - 0.5), 1e-15);
  EXPECT_NEAR(Y.energy(), 1.0, 1e-15);
}

TEST(Modem, SingleSampleSynthesisIsTheSubpulse) {
  const PulseBank pb(0.15, 20);
  CVec s = CVec::Zero(16);
  s[0] = 1.0;
  const Waveform w = synthesize_waveform(s, pb, 8, {});
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    const double t = static_cast<double>(w.first_index + static_cast<long>(i)) / 8.0;
    EXPECT_LE(std::abs(w.samples[i] - pb.a(t)), 1e-12) << t;
  }
}

TEST(Modem, WaveformGeometry) {
  const SystemParams p = desk_params();
  const PulseBank pb(p);
  const CVec s = CVec::Ones(p.frame_size());
  const Waveform w = synthesize_waveform(s, p, pb, true);
  EXPECT_EQ(w.O, p.O);
  EXPECT_EQ(w.cp_len, p.l_max);
  EXPECT_DOUBLE_EQ(w.rate_hz(p), p.O * p.M / p.T);
  EXPECT_GE(static_cast<long>(w.samples.size()), static_cast<long>(p.O) * (p.frame_size() + p.l_max));
  EXPECT_LT(w.start_offset_s(p), 0.0);
  const auto [lo, hi] = w.body(0, p.frame_size());
  EXPECT_EQ(hi - lo, static_cast<long>(p.O) * p.frame_size());
  EXPECT_EQ(w.first_index + lo, 0);
}

TEST(Modem, PilotWaveformPower) {
  const SystemParams p = desk_params();
  const PulseBank pb(p);
  const double Ec = 0.7;
  const Waveform w = synthesize_waveform(oddm_modulate(build_pilot_frame(p, PilotKind::dd_srn_fmcw, Ec)), p, pb, true);
  const auto [lo, hi] = w.body(0, p.frame_size());
  double acc = 0.0;
  for (long i = lo; i < hi; ++i) acc += std::norm(w.samples[i]);
  EXPECT_NEAR(acc / (hi - lo) / Ec, 1.0, 0.02);
}

TEST(Modem, MatchedFilterInvertsSynthesis) {
  Rng rng(4);
  const PulseBank pb(0.15, 20);
  const CVec s = oracle::random_vector(rng, 256);
  const Waveform w = synthesize_waveform(s, pb, 8, {});
  const CVec r = matched_filter_sample(w, pb, 256);
  EXPECT_LE((r - s).cwiseAbs().maxCoeff(), 1e-5);
  const CVec z = matched_filter_sample(synthesize_waveform(CVec::Zero(64), pb, 4, {}), pb, 64);
  EXPECT_EQ(z.cwiseAbs().maxCoeff(), 0.0);
  Waveform shortw = w;
  shortw.samples.resize(100);
  EXPECT_THROW(matched_filter_sample(shortw, pb, 256), std::invalid_argument);
}

TEST(Modem, IntegerDelayWithPrefixIsCyclicShift) {
  Rng rng(5);
  const SystemParams p = make_params(16, 8, 1.0, 0.0, 0.15, 20, 8, 8);
  const PulseBank pb(p);
  const CVec s = oracle::random_vector(rng, p.frame_size());
  // the extension also carries the pulse tails so the cyclic model holds at the frame edges
  const CyclicExtension ext{p.l_max + 2 * p.Q, 2 * p.Q};
  for (int l : {0, 1, 3, 7}) {
    const Waveform w = apply_channel_continuous(s, {{1.0, double(l), 0.0}}, pb, p.O, ext);
    const CVec r = matched_filter_sample(w, pb, p.frame_size());
    for (long q = 0; q < p.frame_size(); ++q)
      EXPECT_LE(std::abs(r[q] - s[(q - l + p.frame_size()) % p.frame_size()]), 1e-5);
  }
}

TEST(Modem, OversampledChannelMatchesSymbolRateModel) {
  Rng rng(6);
  const SystemParams p = paper_params();
  const PulseBank pb(p);
  const CyclicExtension ext{p.l_max + 2 * p.Q, 2 * p.Q};
  auto rel = [&](const std::vector<PathParams>& paths, const CVec& s) {
    const CVec ref = apply_channel_noiseless(s, paths, p, pb);
    const CVec r = matched_filter_sample(apply_channel_continuous(s, paths, pb, p.O, ext), pb, p.frame_size());
    return (r - ref).norm() / ref.norm();
  };
  const CVec s0 = oracle::random_vector(rng, p.frame_size());
  EXPECT_LE(rel({{1.0, 2.5, 0.3}}, s0), 1e-3);
  for (int t = 0; t < 2; ++t) {
    const CVec s = oracle::random_vector(rng, p.frame_size());
    std::vector<PathParams> paths;
    for (int i = 0; i < 2; ++i)
      paths.push_back({complex_normal(rng, 0.5), uniform(rng, 0, p.l_max - 1), uniform(rng, -2, 2)});
    EXPECT_LE(rel(paths, s), 1e-3);
  }
}

TEST(Modem, GoodFftSize) {
  EXPECT_EQ(good_fft_size(1), 1);
  EXPECT_EQ(good_fft_size(7), 8);
  EXPECT_EQ(good_fft_size(11), 12);
  EXPECT_EQ(good_fft_size(121), 125);
  EXPECT_EQ(good_fft_size(1024), 1024);
}
