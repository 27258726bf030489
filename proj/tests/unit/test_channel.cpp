#include <gtest/gtest.h>

#include "ddfmcw/channel.hpp"
#include "ddfmcw/chirp.hpp"
#include "ddfmcw/modem.hpp"
#include "ddfmcw/sensing.hpp"
#include "oracles.hpp"

using namespace ddfmcw;

namespace {

const SystemParams kSmall = make_params(16, 8, 1.0, 0.0, 0.15, 20, 8, 8);

std::vector<PathParams> random_paths(Rng& rng, int P, double l_hi, double k_hi) {
  std::vector<PathParams> v;
  for (int i = 0; i < P; ++i) v.push_back({complex_normal(rng, 1.0 / P), uniform(rng, 0, l_hi), uniform(rng, -k_hi, k_hi)});
  return v;
}

}  // namespace

TEST(Channel, ProfileFromPhysicalUnits) {
  const SystemParams p = paper_params();
  const ChannelProfile c = ChannelProfile::from_physical(kTauMax, kNuMax, p, 4);
  EXPECT_NEAR(c.l_max_chan, kTauMax * p.M / p.T, 1e-12);
  EXPECT_NEAR(c.k_max, kNuMax * p.N * p.T, 1e-12);
  EXPECT_EQ(c.P, 4);
}

TEST(Channel, SampleChannelRangesAndDeterminism) {
  Rng a(42), b(42);
  const ChannelRealization x = sample_channel(a, 3, 10.0, 2.0);
  const ChannelRealization y = sample_channel(b, 3, 10.0, 2.0);
  ASSERT_EQ(x.paths.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(x.paths[i].h, y.paths[i].h);
    EXPECT_EQ(x.paths[i].l, y.paths[i].l);
    EXPECT_GE(x.paths[i].l, 0.0);
    EXPECT_LT(x.paths[i].l, 10.0);
    EXPECT_LE(std::abs(x.paths[i].k), 2.0);
  }
  EXPECT_THROW(sample_channel(a, 0, 1, 1), ConfigError);
}

TEST(Channel, TotalGainIsUnitOnAverage) {
  Rng rng(7);
  const int n = 10000, P = 4;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double g = 0.0;
    for (const auto& p : sample_channel(rng, P, 1.0, 1.0).paths) g += std::norm(p.h);
    s += g;
    s2 += g * g;
  }
  const double mean = s / n, sd = std::sqrt((s2 / n - mean * mean) / n);
  EXPECT_NEAR(mean, 1.0, 3 * sd);
}

TEST(Channel, IdentityAndPhaseRampPaths) {
  Rng rng(1);
  const PulseBank pb(kSmall);
  const CVec s = oracle::random_vector(rng, kSmall.frame_size());
  const CVec r = apply_channel_noiseless(s, {{1.0, 0.0, 0.0}}, kSmall, pb);
  EXPECT_LE((r - s).cwiseAbs().maxCoeff(), 1e-14);
  const CVec q = apply_channel_noiseless(s, {{1.0, 0.0, double(kSmall.N)}}, kSmall, pb);
  for (long i = 0; i < s.size(); ++i) EXPECT_NEAR(std::abs(q[i]), std::abs(s[i]), 1e-13);
}

TEST(Channel, TransformPathEquivalence) {
  Rng rng(2);
  const PulseBank pb(kSmall);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const DDFrame X(oracle::random_frame(rng, kSmall.M, kSmall.N), FrameRole::data);
    const auto paths = random_paths(rng, 2, kSmall.l_max - 1.0, 3.0);
    const DDFrame A = oddm_demodulate(apply_channel_noiseless(oddm_modulate(X), paths, kSmall, pb), kSmall.M, kSmall.N);
    const DDFrame B = dd_response(X, paths, kSmall, pb);
    worst = std::max(worst, oracle::max_abs(A.grid - B.grid));
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(Channel, OnGridImpulseMovesOneCell) {
  const PulseBank pb(kSmall);
  for (auto [l, k] : {std::pair{2, 1}, std::pair{5, -2}, std::pair{0, 3}}) {
    const int m0 = 3, n0 = 6;
    DDFrame X = DDFrame::zeros(kSmall.M, kSmall.N, FrameRole::pilot);
    X.grid(m0, n0) = 1.0;
    const DDFrame Y = dd_response(X, {{1.0, double(l), double(k)}}, kSmall, pb);
    const int m1 = (m0 + l) % kSmall.M, n1 = ((n0 + k) % kSmall.N + kSmall.N) % kSmall.N;
    EXPECT_NEAR(std::abs(Y.grid(m1, n1)), 1.0, 1e-12);
    EXPECT_NEAR(Y.energy(), 1.0, 1e-12);
  }
  EXPECT_EQ(dd_response(DDFrame(CMat::Ones(16, 8), FrameRole::data), {}, kSmall, pb).energy(), 0.0);
}

TEST(Channel, LinearityAndOnGridEnergy) {
  Rng rng(3);
  const PulseBank pb(kSmall);
  const auto paths = random_paths(rng, 3, 7.0, 3.0);
  const CMat X1 = oracle::random_frame(rng, 16, 8), X2 = oracle::random_frame(rng, 16, 8);
  const CMat lhs = dd_response(DDFrame(X1 + X2, FrameRole::data), paths, kSmall, pb).grid;
  const CMat rhs = dd_response(DDFrame(X1, FrameRole::data), paths, kSmall, pb).grid +
                   dd_response(DDFrame(X2, FrameRole::data), paths, kSmall, pb).grid;
  EXPECT_LE(oracle::max_abs(lhs - rhs), 1e-10);
  const DDFrame Y = dd_response(DDFrame(X1, FrameRole::data), {{std::polar(1.0, 0.3), 4.0, -2.0}}, kSmall, pb);
  EXPECT_NEAR(Y.energy() / X1.squaredNorm(), 1.0, 1e-6);
}

TEST(Channel, DerivativesMatchFiniteDifferences) {
  Rng rng(4);
  const PulseBank pb(kSmall);
  const double h = 1e-5;
  for (int t = 0; t < 50; ++t) {
    const DDFrame X(oracle::random_frame(rng, 16, 8), FrameRole::data);
    const PathParams pp{complex_normal(rng, 1.0), uniform(rng, 0.01, 6.99), uniform(rng, -3, 3)};
    const PathDerivatives D = dd_response_derivatives(X, pp, kSmall, pb);
    auto resp = [&](PathParams q) { return dd_response(X, {q}, kSmall, pb).grid; };
    auto rel = [](const CMat& a, const CMat& b) { return (a - b).norm() / b.norm(); };
    PathParams a = pp, b = pp;
    a.l += h;
    b.l -= h;
    EXPECT_LE(rel(D.d_l, (resp(a) - resp(b)) / (2 * h)), 1e-4);
    a = pp;
    b = pp;
    a.k += h;
    b.k -= h;
    EXPECT_LE(rel(D.d_k, (resp(a) - resp(b)) / (2 * h)), 1e-4);
    const double mag = std::abs(pp.h), ph = std::arg(pp.h);
    a = pp;
    b = pp;
    a.h = std::polar(mag + h, ph);
    b.h = std::polar(mag - h, ph);
    EXPECT_LE(rel(std::polar(1.0, ph) * D.unit, (resp(a) - resp(b)) / (2 * h)), 1e-4);
    a.h = std::polar(mag, ph + h);
    b.h = std::polar(mag, ph - h);
    EXPECT_LE(rel(cplx(0, 1) * pp.h * D.unit, (resp(a) - resp(b)) / (2 * h)), 1e-4);
  }
}

TEST(Channel, AtomsAreUnitPathResponses) {
  const SystemParams p = desk_params();
  const PulseBank pb(p);
  const double Ec = 0.25;
  const Pilot pl = make_pilot(p, PilotKind::dd_srn_fmcw, Ec);
  AtomDictionary atoms(pl, p, pb);
  const DDFrame Xc = pilot_frame(pl, p.N);
  for (auto [l, k] : {std::pair{0.0, 0.0}, std::pair{3.5, -1.25}, std::pair{12.0, 2.0}}) {
    const DDFrame Y = dd_response(Xc, {{1.0, l, k}}, p, pb);
    const CVec& a = atoms.atom(l, k);
    EXPECT_LE((a - Eigen::Map<const CVec>(Y.grid.data(), a.size())).cwiseAbs().maxCoeff(), 1e-12 * a.norm());
  }
  EXPECT_NEAR(atoms.atom(0, 0).squaredNorm(), p.M * p.N * Ec, 1e-9);
  const DDFrame D = dd_chirp_compress(DDFrame(Eigen::Map<const CMat>(atoms.atom(0, 0).data(), p.M, p.N), FrameRole::received),
                                      pl.sequence);
  EXPECT_NEAR(std::norm(D.grid(0, 0)), double(p.M) * p.M * p.N * Ec, 1e-6 * p.M * p.M * p.N * Ec);
  EXPECT_THROW(atoms.atom(p.l_max + 1.0, 0), std::out_of_range);
}

TEST(Channel, NoiseInjection) {
  Rng rng(5);
  CVec v = CVec::Zero(1000000);
  CVec w = v;
  add_noise(w, 0.0, rng);
  EXPECT_EQ(w.cwiseAbs().maxCoeff(), 0.0);
  add_noise(v, 0.3, rng);
  EXPECT_NEAR(v.squaredNorm() / v.size() / 0.3, 1.0, 0.01);
  EXPECT_NEAR(v.real().squaredNorm() / v.imag().squaredNorm(), 1.0, 0.01);
  EXPECT_THROW(add_noise(v, -1.0, rng), ConfigError);
  EXPECT_NEAR(noise_variance(2.0, 10.0), 0.2, 1e-15);
}

TEST(Channel, SymbolRateNoiseVariance) {
  Rng rng(6);
  const PulseBank pb(kSmall);
  ChannelRealization ch;
  ch.paths = {{1.0, 0.0, 0.0}};
  ch.sigma_z2 = 0.05;
  const CVec s = CVec::Zero(kSmall.frame_size());
  double acc = 0.0;
  for (int t = 0; t < 500; ++t) acc += apply_channel_symbol_rate(s, ch, kSmall, pb, rng).squaredNorm();
  EXPECT_NEAR(acc / (500.0 * kSmall.frame_size()) / 0.05, 1.0, 0.03);
}

TEST(Channel, JsonRoundTrip) {
  ChannelRealization c;
  c.paths = {{cplx(0.5, -0.25), 3.125, -1.5}, {cplx(-1, 2), 0.0, 0.75}};
  c.sigma_z2 = 0.01;
  const ChannelRealization d = channel_from_json(channel_to_json(c));
  ASSERT_EQ(d.paths.size(), 2u);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(d.paths[i].h, c.paths[i].h);
    EXPECT_EQ(d.paths[i].l, c.paths[i].l);
    EXPECT_EQ(d.paths[i].k, c.paths[i].k);
  }
  EXPECT_EQ(d.sigma_z2, c.sigma_z2);
  EXPECT_THROW(channel_from_json("{\"paths\":[[1,2,3]]}"), ConfigError);
}
