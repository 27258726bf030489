#include <cmath>
#include <limits>
#include <stdexcept>

#include "ddfmcw/analysis.hpp"

namespace ddfmcw {

Eigen::MatrixXd fisher(const std::vector<PathParams>& paths, const DDFrame& X, double sigma_z2,
                       const SystemParams& p, const PulseBank& pb) {
  if (!(sigma_z2 > 0.0)) throw std::invalid_argument("fisher: noise variance must be positive");
  const Eigen::Index P = static_cast<Eigen::Index>(paths.size());
  const Eigen::Index MN = static_cast<Eigen::Index>(X.M()) * X.N();
  CMat J(MN, 4 * P);
  for (Eigen::Index i = 0; i < P; ++i) {
    const PathParams& path = paths[static_cast<std::size_t>(i)];
    const PathDerivatives d = dd_response_derivatives(X, path, p, pb);
    const double mag = std::abs(path.h);
    const cplx dir = mag > 0.0 ? path.h / mag : cplx{1.0, 0.0};
    const Eigen::Map<const CVec> unit(d.unit.data(), MN);
    J.col(4 * i) = dir * unit;
    J.col(4 * i + 1) = cplx{0.0, 1.0} * path.h * unit;
    J.col(4 * i + 2) = Eigen::Map<const CVec>(d.d_l.data(), MN);
    J.col(4 * i + 3) = Eigen::Map<const CVec>(d.d_k.data(), MN);
  }
  Eigen::MatrixXd F = (2.0 / sigma_z2) * (J.adjoint() * J).real();
  return 0.5 * (F + F.transpose());
}

CrbResult crb_from_fisher(const Eigen::MatrixXd& F) {
  CrbResult r;
  const Eigen::Index n = F.rows();
  r.bounds = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  if (n == 0) return r;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(F, Eigen::EigenvaluesOnly);
  const double lmax = es.eigenvalues().maxCoeff();
  const double lmin = es.eigenvalues().minCoeff();
  r.condition = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  if (!(lmax > 0.0) || r.condition > 1e14) {
    r.singular = true;
    return r;
  }
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(F);
  const Eigen::MatrixXd inv_cols = ldlt.solve(Eigen::MatrixXd::Identity(n, n));
  r.bounds = inv_cols.diagonal();
  return r;
}

CrbResult crb(const std::vector<PathParams>& paths, const DDFrame& X, double sigma_z2, const SystemParams& p,
              const PulseBank& pb) {
  return crb_from_fisher(fisher(paths, X, sigma_z2, p, pb));
}

NrmseBound crb_nrmse(const CrbResult& c, double l_norm, double k_norm) {
  const int P = static_cast<int>(c.bounds.size() / 4);
  NrmseBound b;
  if (P == 0) return b;
  double sl = 0.0, sk = 0.0;
  for (int i = 0; i < P; ++i) {
    sl += c.delay(i);
    sk += c.doppler(i);
  }
  b.delay = std::sqrt(sl / P) / l_norm;
  b.doppler = std::sqrt(sk / P) / k_norm;
  return b;
}

}  // namespace ddfmcw
