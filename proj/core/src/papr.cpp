#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ddfmcw/analysis.hpp"

namespace ddfmcw {

namespace {

double papr_range(const cplx* s, long n) {
  if (n <= 0) throw std::invalid_argument("papr: empty waveform");
  double peak = 0.0, sum = 0.0;
  for (long i = 0; i < n; ++i) {
    const double v = std::norm(s[i]);
    peak = std::max(peak, v);
    sum += v;
  }
  if (!(sum > 0.0)) throw std::invalid_argument("papr: zero-power waveform");
  return linear_to_db(peak * static_cast<double>(n) / sum);
}

}  // namespace

double papr_db(const Waveform& w, long begin, long end) {
  const auto [lo, hi] = w.body(begin, end);
  return papr_range(w.samples.data() + lo, hi - lo);
}

double papr_db(const std::vector<cplx>& s) { return papr_range(s.data(), static_cast<long>(s.size())); }

double marcum_q1(double a, double b) {
  if (a < 0.0 || b < 0.0) throw std::invalid_argument("marcum_q1: negative argument");
  if (b == 0.0) return 1.0;
  const double lam = 0.5 * a * a;
  const double x = 0.5 * b * b;
  if (lam == 0.0) return std::exp(-x);
  // Q1 = sum_k Pois(k; lam) P[Pois(x) <= k], run until the Poisson(lam) weights are spent
  const long k_max = static_cast<long>(std::ceil(lam + 12.0 * std::sqrt(lam) + 40.0));
  double log_w = -lam;
  double t = std::exp(-x);
  double u = t;
  double q = 0.0;
  for (long k = 0; k <= k_max; ++k) {
    q += std::exp(log_w) * u;
    log_w += std::log(lam / static_cast<double>(k + 1));
    t *= x / static_cast<double>(k + 1);
    u = std::min(1.0, u + t);
  }
  return std::clamp(q, 0.0, 1.0);
}

double sample_tail(double rho, double gamma0) {
  return marcum_q1(std::sqrt(2.0 * rho), std::sqrt(2.0 * gamma0 * (1.0 + rho)));
}

double ccdf_analytic(double rho, long MN, double gamma0) {
  if (gamma0 <= 0.0) return 1.0;
  const double q = sample_tail(rho, gamma0);
  if (q >= 1.0) return 1.0;
  return -std::expm1(static_cast<double>(MN) * std::log1p(-q));
}

double ccdf_analytic_threshold_db(double rho, long MN, double tail) {
  double lo = -10.0, hi = 30.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (ccdf_analytic(rho, MN, db_to_linear(mid)) > tail)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> empirical_ccdf(const std::vector<double>& v, const std::vector<double>& gamma0_db) {
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  out.reserve(gamma0_db.size());
  const double n = static_cast<double>(sorted.size());
  for (double g : gamma0_db) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), g);
    out.push_back(static_cast<double>(sorted.end() - it) / n);
  }
  return out;
}

double empirical_threshold_db(std::vector<double> v, double tail) {
  if (v.empty()) throw std::invalid_argument("empirical threshold: no samples");
  std::sort(v.begin(), v.end(), std::greater<>());
  // v[i] is exceeded by a fraction i / n of the samples (strictly)
  const double n = static_cast<double>(v.size());
  const double pos = tail * n - 0.5;
  if (pos <= 0.0) return v.front();
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= v.size()) return v.back();
  const double frac = pos - static_cast<double>(i);
  return v[i] + frac * (v[i + 1] - v[i]);
}

}  // namespace ddfmcw
