#include <gtest/gtest.h>

#include "ddfmcw/channel.hpp"
#include "ddfmcw/detection.hpp"
#include "oracles.hpp"

using namespace ddfmcw;

namespace {

SystemParams small() { return make_params(16, 8, 66.67e-6, 5e9, 0.15, 20, 8, 8); }

DDFrame qam_frame(Rng& rng, const SystemParams& p, const Constellation& c, double amp) {
  DDFrame X = DDFrame::zeros(p.M, p.N, FrameRole::data);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(c.points.size()) - 1);
  for (int n = 1; n < p.N; ++n)
    for (int m = 0; m < p.M; ++m) X.grid(m, n) = amp * c.points[pick(rng)];
  return X;
}

}  // namespace

TEST(Detection, EffectiveChannelMatchesIoRelation) {
  const SystemParams p = small();
  PulseBank pb(p);
  Rng rng(1);
  for (int t = 0; t < 10; ++t) {
    const auto chan = sample_channel(rng, 3, p.l_max, 2.0);
    const EffectiveChannel G = build_effective_channel(chan.paths, p, pb);
    const CVec s = oracle::random_vector(rng, p.M * p.N);
    const CVec a = G.apply(s);
    const CVec b = apply_channel_noiseless(s, chan.paths, p, pb);
    EXPECT_LE(oracle::max_abs(a - b), 1e-10 * (1.0 + b.cwiseAbs().maxCoeff()));
    EXPECT_LE(oracle::max_abs(G.dense() * s - b), 1e-10 * (1.0 + b.cwiseAbs().maxCoeff()));
  }
}

TEST(Detection, SubChannelIsRestrictionOfDense) {
  const SystemParams p = small();
  PulseBank pb(p);
  Rng rng(2);
  const auto chan = sample_channel(rng, 2, p.l_max, 2.0);
  const EffectiveChannel G = build_effective_channel(chan.paths, p, pb);
  const CMat D = G.dense();
  for (long q : {0L, 5L, 17L, G.MN() - 1}) {
    const auto sc = G.sub_channel(q);
    for (std::size_t i = 0; i < sc.rows.size(); ++i)
      for (std::size_t j = 0; j < sc.cols.size(); ++j)
        EXPECT_EQ(sc.G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), D(sc.rows[i], sc.cols[j]));
    for (int o = 0; o < G.L_g(); ++o)
      EXPECT_EQ(G.g(q)[o], D(G.row(q, o), q));
  }
}

TEST(Detection, ConstellationLabels) {
  for (const char* name : {"qam4", "bpsk"}) {
    const Constellation c = make_constellation(name);
    double e = 0.0;
    for (const auto& x : c.points) e += std::norm(x);
    EXPECT_NEAR(e / c.points.size(), 1.0, 1e-12);
    for (std::size_t i = 0; i < c.points.size(); ++i) EXPECT_EQ(c.nearest(c.points[i] * 0.7), static_cast<int>(i));
  }
  const Constellation q = make_constellation("qam4");
  EXPECT_EQ(q.bits_per_symbol(), 2);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      const double d = std::abs(q.points[i] - q.points[j]);
      int hamming = 0;
      for (int b = 0; b < 2; ++b) hamming += q.bits[i][b] != q.bits[j][b];
      if (std::abs(d - std::sqrt(2.0)) < 1e-9) {
        EXPECT_EQ(hamming, 1);
      }
    }
  EXPECT_THROW(make_constellation("qam64"), ConfigError);
}

TEST(Detection, IdentityChannelHighSnrIsErrorFree) {
  const SystemParams p = small();
  PulseBank pb(p);
  Rng rng(3);
  const Constellation c = make_constellation("qam4");
  const DetectorSetup setup = data_detector_setup(p, c, 1.0, CMat());
  const EffectiveChannel G = build_effective_channel({{1.0, 0.0, 0.0}}, p, pb);
  const DDFrame X = qam_frame(rng, p, c, 1.0);
  DDFrame Y = oddm_demodulate(G.apply(oddm_modulate(X)), p.M, p.N);
  add_noise(Y, 1e-3, rng);
  const DetectionResult r = sic_mmse_detect(Y, G, 1e-3, setup);
  const BitErrors e = count_bit_errors(r.detected, X, setup);
  EXPECT_EQ(e.errors, 0);
  EXPECT_EQ(e.bits, 2L * p.M * (p.N - 1));
  EXPECT_LE(oracle::max_abs(r.beliefs.mean - X.grid), 0.2);
}

TEST(Detection, PosteriorVarianceNotAbovePrior) {
  const SystemParams p = small();
  PulseBank pb(p);
  Rng rng(4);
  const Constellation c = make_constellation("qam4");
  const DetectorSetup setup = data_detector_setup(p, c, 1.0, CMat());
  for (int t = 0; t < 5; ++t) {
    const auto chan = sample_channel(rng, 3, p.l_max, 2.0);
    const EffectiveChannel G = build_effective_channel(chan.paths, p, pb);
    const DDFrame X = qam_frame(rng, p, c, 1.0);
    CVec r = G.apply(oddm_modulate(X));
    add_noise(r, 0.1, rng);
    SymbolBeliefs b = initial_beliefs(setup, p.M, p.N);
    const SweepStats st = sic_mmse_sweep(b, r, G, 0.1, setup);
    EXPECT_LE(st.max_variance_increase, 1e-9);
    EXPECT_LE(b.var.maxCoeff(), 1.0 + 1e-12);
    EXPECT_GE(b.var.minCoeff(), 0.0);
  }
}

TEST(Detection, PhaseRotationOfChannelIsAbsorbed) {
  const SystemParams p = small();
  PulseBank pb(p);
  Rng rng(5);
  const Constellation c = make_constellation("qam4");
  const DetectorSetup setup = data_detector_setup(p, c, 1.0, CMat());
  auto paths = sample_channel(rng, 2, p.l_max, 2.0).paths;
  const DDFrame X = qam_frame(rng, p, c, 1.0);
  const EffectiveChannel G = build_effective_channel(paths, p, pb);
  CVec r = G.apply(oddm_modulate(X));
  add_noise(r, 0.05, rng);
  const cplx rot = std::polar(1.0, 0.9);
  for (auto& q : paths) q.h *= rot;
  const EffectiveChannel Gr = build_effective_channel(paths, p, pb);
  const DDFrame Y = oddm_demodulate(r, p.M, p.N);
  DDFrame Yr = Y;
  Yr.grid *= rot;
  const DetectionResult a = sic_mmse_detect(Y, G, 0.05, setup);
  const DetectionResult b = sic_mmse_detect(Yr, Gr, 0.05, setup);
  EXPECT_LE(oracle::max_abs(a.beliefs.mean - b.beliefs.mean), 1e-8);
  EXPECT_EQ(a.detected.grid, b.detected.grid);
}

TEST(Detection, JceddNoiselessRecoversData) {
  const SystemParams p = desk_params();
  PulseBank pb(p);
  Rng rng(6);
  const Constellation c = make_constellation("qam4");
  const PowerAllocation pw = split_power(db_to_linear(-8.0), 1.0);
  const Pilot pl = make_pilot(p, PilotKind::dd_srn_fmcw, pw.E_c);
  const double amp = std::sqrt(pw.E_s * p.N / (p.N - 1));
  const DetectorSetup setup = data_detector_setup(p, c, amp, pilot_frame(pl, p.N).grid);
  const DDFrame Xd = qam_frame(rng, p, c, amp);
  const std::vector<PathParams> truth{{0.8, 4.3, 1.2}, {cplx(0.1, -0.5), 19.7, -2.6}};
  const DDFrame Xall(Xd.grid + pilot_frame(pl, p.N).grid, FrameRole::composite);
  DDFrame Y = dd_response(Xall, truth, p, pb);
  const double s2 = 1e-4;
  add_noise(Y, s2, rng);
  AtomDictionary atoms(pl, p, pb);
  JceddConfig cfg;
  cfg.sensing.P_max = 2;
  const DetectionResult r = jcedd(Y, atoms, s2, setup, cfg, pb);
  EXPECT_EQ(count_bit_errors(r.detected, Xd, setup).errors, 0);
  ASSERT_EQ(r.paths.size(), 2u);
  for (const auto& t : truth) {
    double best = 1e9;
    for (const auto& e : r.paths) best = std::min(best, std::hypot(e.l_hat - t.l, e.k_hat - t.k));
    EXPECT_LE(best, 0.05);
  }
  for (int m = 0; m < p.M; ++m) EXPECT_EQ(r.detected.grid(m, 0), pilot_frame(pl, p.N).grid(m, 0));
}

TEST(Detection, BitCountExcludesKnownPositions) {
  const SystemParams p = small();
  const Constellation c = make_constellation("bpsk");
  const DetectorSetup setup = data_detector_setup(p, c, 2.0, CMat());
  DDFrame truth = DDFrame::zeros(p.M, p.N, FrameRole::data);
  truth.grid.rightCols(p.N - 1).setConstant(2.0);
  DDFrame det = truth;
  det.grid(3, 2) = -2.0;
  det.grid(0, 0) = 99.0;
  const BitErrors e = count_bit_errors(det, truth, setup);
  EXPECT_EQ(e.errors, 1);
  EXPECT_EQ(e.bits, static_cast<long>(p.M) * (p.N - 1));
}
