#include "ddfmcw/metrics.hpp"

#include <cmath>
#include <limits>

namespace ddfmcw {

double nmse_vs_virtual_ddip(const std::vector<PathEstimate>& est, const std::vector<PathParams>& truth,
                            const SystemParams& p, const PulseBank& pb, int m_pilot) {
  const int mp = m_pilot >= 0 ? m_pilot : p.l_max;
  DDFrame X = DDFrame::zeros(p.M, p.N, FrameRole::pilot);
  X.grid(mp % p.M, 0) = 1.0;
  const DDFrame yt = dd_response(X, truth, p, pb);
  const double ref = yt.energy();
  if (!(ref > 0.0)) throw std::invalid_argument("nmse: true channel has no energy");
  if (est.empty()) return 1.0;
  const DDFrame ye = dd_response(X, to_paths(est), p, pb);
  return (ye.grid - yt.grid).squaredNorm() / ref;
}

std::vector<int> associate(const std::vector<PathEstimate>& est, const std::vector<PathParams>& truth,
                           const AxisScales& s) {
  std::vector<int> match(truth.size(), -1);
  std::vector<bool> used(est.size(), false);
  for (std::size_t round = 0; round < std::min(est.size(), truth.size()); ++round) {
    double best = std::numeric_limits<double>::infinity();
    int bt = -1, be = -1;
    for (std::size_t t = 0; t < truth.size(); ++t) {
      if (match[t] >= 0) continue;
      for (std::size_t e = 0; e < est.size(); ++e) {
        if (used[e]) continue;
        const double dl = (est[e].l_hat - truth[t].l) / s.l_span;
        const double dk = (est[e].k_hat - truth[t].k) / s.k_span;
        const double d = dl * dl + dk * dk;
        if (d < best) {
          best = d;
          bt = static_cast<int>(t);
          be = static_cast<int>(e);
        }
      }
    }
    if (bt < 0) break;
    match[bt] = be;
    used[be] = true;
  }
  return match;
}

MatchedErrors matched_errors(const std::vector<PathEstimate>& est, const std::vector<PathParams>& truth,
                             const AxisScales& s) {
  const std::vector<int> match = associate(est, truth, s);
  MatchedErrors out;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    if (match[t] < 0) {
      out.delay2.push_back(1.0);
      out.doppler2.push_back(1.0);
      continue;
    }
    const PathEstimate& e = est[static_cast<std::size_t>(match[t])];
    const double dl = (e.l_hat - truth[t].l) / s.l_span;
    const double dk = (e.k_hat - truth[t].k) / s.k_span;
    out.delay2.push_back(dl * dl);
    out.doppler2.push_back(dk * dk);
  }
  return out;
}

double nrmse(const std::vector<PathEstimate>& est, const std::vector<PathParams>& truth, Axis axis,
             const AxisScales& s) {
  if (truth.empty()) return 0.0;
  const MatchedErrors m = matched_errors(est, truth, s);
  const auto& v = axis == Axis::delay ? m.delay2 : m.doppler2;
  double sum = 0.0;
  for (double x : v) sum += x;
  return std::sqrt(sum / static_cast<double>(v.size()));
}

}  // namespace ddfmcw
