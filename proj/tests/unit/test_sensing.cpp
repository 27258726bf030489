#include <gtest/gtest.h>

#include "ddfmcw/channel.hpp"
#include "ddfmcw/chirp.hpp"
#include "ddfmcw/sensing.hpp"
#include "oracles.hpp"

using namespace ddfmcw;

namespace {

struct Fixture {
  SystemParams p = desk_params();
  PulseBank pb{p};
  Pilot pilot = make_pilot(p, PilotKind::dd_srn_fmcw, 1.0);
  DDFrame Xc = pilot_frame(pilot, p.N);
  DDFrame response(const std::vector<PathParams>& paths) const { return dd_response(Xc, paths, p, pb); }
};

}  // namespace

TEST(Sensing, CompressionMatchesDirectCorrelation) {
  Rng rng(1);
  const CMat Y = oracle::random_frame(rng, 12, 3);
  const CVec c = oracle::random_vector(rng, 12);
  const DDFrame D = dd_chirp_compress(DDFrame(Y, FrameRole::received), c);
  for (int md = 0; md < 12; ++md)
    for (int n = 0; n < 3; ++n) {
      cplx acc = 0.0;
      for (int m = 0; m < 12; ++m) acc += std::conj(c[((m - md) % 12 + 12) % 12]) * Y(m, n);
      EXPECT_LE(std::abs(D.grid(md, n) - acc), 1e-10);
    }
  EXPECT_EQ(dd_chirp_compress(DDFrame(CMat::Zero(12, 3), FrameRole::received), c).grid.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(dd_chirp_compress(DDFrame(Y, FrameRole::received), CVec::Ones(5)), std::invalid_argument);
}

TEST(Sensing, CompressionPeakAtPathCell) {
  Fixture f;
  const DDFrame D = dd_chirp_compress(f.response({{1.0, 5.0, 2.0}}), f.pilot.sequence);
  Eigen::Index r, c;
  D.grid.cwiseAbs().maxCoeff(&r, &c);
  EXPECT_EQ(r, 5);
  EXPECT_EQ(c, 2);
}

TEST(Sensing, CompressionGainFollowsNyquistPulse) {
  Fixture f;
  const double amp = f.p.M * std::sqrt(f.p.N * f.pilot.E_c);
  const cplx h = std::polar(0.8, 1.1);
  DDFrame D = dd_chirp_compress(f.response({{h, 6.0, 0.0}}), f.pilot.sequence);
  EXPECT_NEAR(std::abs(D.grid(6, 0)) / (amp * 0.8), 1.0, 1e-6);
  D = dd_chirp_compress(f.response({{h, 6.3, 0.0}}), f.pilot.sequence);
  for (int md = 0; md < f.p.M; ++md) {
    int d = md - 6;
    if (d > f.p.M / 2) d -= f.p.M;
    const double expected = std::abs(d) <= f.p.Q ? amp * 0.8 * std::abs(oracle::rc_textbook(d - 0.3, f.p.beta)) : 0.0;
    EXPECT_NEAR(std::abs(D.grid(md, 0)), expected, 1e-6 * amp) << md;
  }
}

TEST(Sensing, NoiselessFractionalPathRecovered) {
  Fixture f;
  AtomDictionary atoms(f.pilot, f.p, f.pb);
  SensingConfig cfg;
  cfg.P_max = 1;
  const SensingResult r = omp_grid_evolution(f.response({{1.0, 7.3, -1.6}}), atoms, cfg);
  ASSERT_EQ(r.paths.size(), 1u);
  EXPECT_LE(std::abs(r.paths[0].l_hat - 7.3), std::ldexp(1.0, -8));
  EXPECT_LE(std::abs(r.paths[0].k_hat + 1.6), std::ldexp(1.0, -8));
  EXPECT_EQ(r.paths[0].refinement_level, cfg.L);
  EXPECT_NEAR(std::abs(r.paths[0].h_hat), 1.0, 1e-2);
}

TEST(Sensing, TwoOnGridPathsRecovered) {
  Fixture f;
  AtomDictionary atoms(f.pilot, f.p, f.pb);
  const std::vector<PathParams> truth{{cplx(0.9, 0.2), 4.0, 1.0}, {cplx(-0.3, 0.5), 11.0, -2.0}};
  const DDFrame Y = f.response(truth);
  const SensingResult r = omp_grid_evolution(Y, atoms, SensingConfig{});
  ASSERT_GE(r.paths.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_LE(std::abs(r.paths[i].l_hat - truth[i].l), std::ldexp(1.0, -8));
    EXPECT_LE(std::abs(r.paths[i].k_hat - truth[i].k), std::ldexp(1.0, -8));
    EXPECT_LE(std::abs(r.paths[i].h_hat - truth[i].h), 1e-2);
  }
  EXPECT_LE(r.residual_energy[1], 1e-4 * Y.energy());
  SensingConfig one;
  one.P_max = 1;
  EXPECT_EQ(omp_grid_evolution(Y, atoms, one).paths.size(), 1u);
}

TEST(Sensing, ScaleEquivarianceAndSingleAtomGain) {
  Fixture f;
  AtomDictionary atoms(f.pilot, f.p, f.pb);
  Rng rng(3);
  DDFrame Y = f.response({{cplx(0.7, -0.4), 9.37, 2.21}});
  add_noise(Y, 0.5, rng);
  SensingConfig cfg;
  cfg.P_max = 1;
  const SensingResult a = omp_grid_evolution(Y, atoms, cfg);
  const cplx g(-1.5, 2.0);
  DDFrame Yg = Y;
  Yg.grid *= g;
  const SensingResult b = omp_grid_evolution(Yg, atoms, cfg);
  ASSERT_EQ(a.paths.size(), 1u);
  ASSERT_EQ(b.paths.size(), 1u);
  EXPECT_EQ(a.paths[0].l_hat, b.paths[0].l_hat);
  EXPECT_EQ(a.paths[0].k_hat, b.paths[0].k_hat);
  EXPECT_LE(std::abs(b.paths[0].h_hat - g * a.paths[0].h_hat), 1e-9 * std::abs(b.paths[0].h_hat));
  const CVec& at = atoms.atom(a.paths[0].l_hat, a.paths[0].k_hat);
  const cplx corr = at.dot(Y.vec()) / at.squaredNorm();
  EXPECT_LE(std::abs(a.paths[0].h_hat - corr), 1e-9);
}

TEST(Sensing, DasWithoutDataEqualsOmp) {
  Fixture f;
  AtomDictionary atoms(f.pilot, f.p, f.pb);
  Rng rng(4);
  DDFrame Y = f.response({{0.8, 3.3, 1.2}, {0.5, 17.6, -2.4}});
  add_noise(Y, 0.1, rng);
  const SensingResult o = omp_grid_evolution(Y, atoms, SensingConfig{});
  const SensingResult d = das(Y, atoms, DDFrame::zeros(f.p.M, f.p.N, FrameRole::data), SensingConfig{}, f.pb);
  ASSERT_EQ(o.paths.size(), d.paths.size());
  for (std::size_t i = 0; i < o.paths.size(); ++i) {
    EXPECT_EQ(o.paths[i].l_hat, d.paths[i].l_hat);
    EXPECT_EQ(o.paths[i].k_hat, d.paths[i].k_hat);
  }
  EXPECT_EQ(SensingConfig{}.I_DAS, 4);
  EXPECT_EQ(d.history.size(), 4u);
}

TEST(Sensing, DasReducesDataInterference) {
  Fixture f;
  Rng rng(5);
  const Pilot pl = make_pilot(f.p, PilotKind::dd_srn_fmcw, db_to_linear(-8.0));
  AtomDictionary atoms(pl, f.p, f.pb);
  CMat X = oracle::random_frame(rng, f.p.M, f.p.N);
  X.col(0).setZero();
  const DDFrame Xd(X, FrameRole::data);
  const std::vector<PathParams> truth{{0.8, 5.4, 1.3}, {0.6, 20.2, -3.1}};
  DDFrame Y = dd_response(DDFrame(X + pilot_frame(pl, f.p.N).grid, FrameRole::composite), truth, f.p, f.pb);
  add_noise(Y, 0.01, rng);
  const SensingResult r = das(Y, atoms, Xd, SensingConfig{}, f.pb);
  ASSERT_GE(r.residual_energy.size(), 2u);
  EXPECT_LT(r.residual_energy[1], r.residual_energy[0]);
}

TEST(Sensing, ConfigValidation) {
  SensingConfig c;
  c.P_max = 0;
  EXPECT_THROW(validate(c), ConfigError);
  c = {};
  c.neighborhood = 4;
  EXPECT_THROW(validate(c), ConfigError);
  c = {};
  c.L = -1;
  EXPECT_THROW(validate(c), ConfigError);
  EXPECT_NO_THROW(validate(SensingConfig{}));
}
