#include "ddfmcw/sensing.hpp"

#include <cmath>
#include <stdexcept>

#include "ddfmcw/dft.hpp"

namespace ddfmcw {

void validate(const SensingConfig& cfg) {
  if (cfg.P_max < 1) throw ConfigError("P_max must be at least 1");
  if (cfg.L < 0) throw ConfigError("L must be non-negative");
  if (cfg.I_DAS < 1) throw ConfigError("I_DAS must be at least 1");
  if (cfg.neighborhood < 1 || cfg.neighborhood % 2 == 0) throw ConfigError("neighborhood must be odd");
}

std::vector<PathParams> to_paths(const std::vector<PathEstimate>& est) {
  std::vector<PathParams> out;
  out.reserve(est.size());
  for (const auto& e : est) out.push_back({e.h_hat, e.l_hat, e.k_hat});
  return out;
}

DDFrame dd_chirp_compress(const DDFrame& Y, const CVec& seq) {
  const int M = Y.M(), N = Y.N();
  if (seq.size() != M) throw std::invalid_argument("compress: sequence length differs from M");
  CVec S = seq;
  dft::transform(std::span<cplx>(S.data(), M), dft::Sign::forward);
  CMat D = Y.grid;
  dft::transform(D.data(), M, N, 1, M, dft::Sign::forward);
  for (int n = 0; n < N; ++n) D.col(n).array() *= S.array().conjugate();
  dft::transform(D.data(), M, N, 1, M, dft::Sign::backward);
  D /= static_cast<double>(M);
  return DDFrame(std::move(D), FrameRole::ddr);
}

namespace {

double objective(const CVec& a, const CVec& r) {
  const double an = a.squaredNorm();
  if (an == 0.0) return 0.0;
  return std::norm(a.dot(r)) / an;
}

}  // namespace

SensingResult omp_grid_evolution(const DDFrame& Y, AtomDictionary& atoms, const SensingConfig& cfg) {
  validate(cfg);
  const SystemParams& p = atoms.params();
  const int M = p.M, N = p.N;
  if (Y.M() != M || Y.N() != N) throw std::invalid_argument("omp: frame size mismatch");
  const Eigen::Index MN = static_cast<Eigen::Index>(M) * N;
  const CVec y = Y.vec();
  const double total = y.squaredNorm();

  SensingResult res;
  if (total == 0.0) return res;

  CMat A(MN, 0);
  CVec resid = y;
  double prev = total;
  std::vector<PathEstimate> est;
  const int half = cfg.neighborhood / 2;
  const int l_limit = std::max(1, p.l_max);

  for (int pi = 0; pi < cfg.P_max; ++pi) {
    CMat R = Eigen::Map<const CMat>(resid.data(), M, N);
    const DDFrame D = dd_chirp_compress(DDFrame(R, FrameRole::received), atoms.pilot().sequence);
    int best_m = 0, best_n = 0;
    double best = -1.0;
    for (int md = 0; md < std::min(l_limit, M); ++md) {
      for (int n = 0; n < N; ++n) {
        const double v = std::abs(D.grid(md, n));
        if (v > best) {
          best = v;
          best_m = md;
          best_n = n;
        }
      }
    }
    double l_cur = best_m;
    double k_cur = best_n <= N / 2 ? best_n : best_n - N;
    double obj_cur = objective(atoms.atom(l_cur, k_cur), resid);
    int level = 0;
    for (int ell = 1; ell <= cfg.L; ++ell) {
      const double step = std::ldexp(1.0, -ell);
      double l_best = l_cur, k_best = k_cur, o_best = obj_cur;
      for (int i = -half; i <= half; ++i) {
        const double lc = l_cur + i * step;
        if (lc < 0.0 || lc >= p.l_max) continue;
        for (int j = -half; j <= half; ++j) {
          if (i == 0 && j == 0) continue;
          const double kc = k_cur + j * step;
          const double o = objective(atoms.atom(lc, kc), resid);
          if (o > o_best) {
            o_best = o;
            l_best = lc;
            k_best = kc;
          }
        }
      }
      l_cur = l_best;
      k_cur = k_best;
      obj_cur = o_best;
      level = ell;
    }

    A.conservativeResize(Eigen::NoChange, A.cols() + 1);
    A.col(A.cols() - 1) = atoms.atom(l_cur, k_cur);
    Eigen::ColPivHouseholderQR<CMat> qr(A);
    if (qr.rank() < A.cols()) {
      A.conservativeResize(Eigen::NoChange, A.cols() - 1);
      res.rank_deficient = true;
      break;
    }
    const CVec h = qr.solve(y);
    const CVec new_resid = y - A * h;
    const double energy = new_resid.squaredNorm();
    if (prev - energy <= 1e-12 * total) {
      A.conservativeResize(Eigen::NoChange, A.cols() - 1);
      break;
    }
    est.push_back({0.0, l_cur, k_cur, level});
    for (std::size_t i = 0; i < est.size(); ++i) est[i].h_hat = h[static_cast<Eigen::Index>(i)];
    resid = new_resid;
    prev = energy;
    res.residual_energy.push_back(energy);
  }
  res.paths = std::move(est);
  return res;
}

SensingResult das(const DDFrame& Y, AtomDictionary& atoms, const DDFrame& X_d, const SensingConfig& cfg,
                  const PulseBank& pb) {
  validate(cfg);
  const SystemParams& p = atoms.params();
  SensingResult out;
  DDFrame Yc = Y;
  for (int it = 0; it < cfg.I_DAS; ++it) {
    SensingResult r = omp_grid_evolution(Yc, atoms, cfg);
    const DDFrame Yd = dd_response(X_d, to_paths(r.paths), p, pb);
    Yc.grid = Y.grid - Yd.grid;
    double fit = (Yc.grid).squaredNorm();
    if (!r.residual_energy.empty()) {
      CVec model = CVec::Zero(Y.grid.size());
      for (const auto& e : r.paths) model += e.h_hat * atoms.atom(e.l_hat, e.k_hat);
      fit = (Yc.vec() - model).squaredNorm();
    }
    out.residual_energy.push_back(fit);
    out.rank_deficient = out.rank_deficient || r.rank_deficient;
    out.history.push_back(r.paths);
    out.paths = std::move(r.paths);
  }
  return out;
}

}  // namespace ddfmcw
