#include "ddfmcw/pulses.hpp"

#include <cmath>
#include <numbers>

namespace ddfmcw {

using std::numbers::pi;

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = pi * x;
  return std::sin(px) / px;
}

double sinc_derivative(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) {
    const double p2 = pi * pi;
    return -p2 * x / 3.0 + p2 * p2 * x * x * x / 30.0;
  }
  return (std::cos(pi * x) - sinc(x)) / x;
}

// The textbook closed forms are rearranged so that the points t = 1/(4 beta)
// and x = 1/(2 beta) are regular expressions rather than 0/0.
double srrc(double t, double beta) {
  t = std::abs(t);
  const double v = 4.0 * beta * t;
  if (v < 0.5) {
    return ((1.0 - beta) * sinc((1.0 - beta) * t) + 4.0 * beta / pi * std::cos(pi * t * (1.0 + beta))) /
           (1.0 - v * v);
  }
  const double num = 0.5 * pi * sinc((1.0 - v) / 4.0) * std::cos(pi * t - pi / 4.0) -
                     std::cos(pi * t * (1.0 + beta));
  return num / (pi * t * (1.0 + v));
}

namespace {

// cos(pi beta x) / (1 - (2 beta x)^2) for x >= 0
double rc_window(double x, double beta) {
  const double u = 2.0 * beta * x;
  return 0.5 * pi * sinc((1.0 - u) / 2.0) / (1.0 + u);
}

double rc_window_derivative(double x, double beta) {
  const double u = 2.0 * beta * x;
  const double s = sinc((1.0 - u) / 2.0);
  const double ds = sinc_derivative((1.0 - u) / 2.0);
  return 0.5 * pi * (-beta * ds / (1.0 + u) - 2.0 * beta * s / ((1.0 + u) * (1.0 + u)));
}

}  // namespace

double rc(double x, double beta) {
  x = std::abs(x);
  // exact zeros at the Nyquist crossings
  if (x >= 1.0 && x == std::floor(x) && 2.0 * beta * x != 1.0) return 0.0;
  return sinc(x) * rc_window(x, beta);
}

double rc_derivative(double x, double beta) {
  const double sgn = x < 0.0 ? -1.0 : 1.0;
  const double ax = std::abs(x);
  return sgn * (sinc_derivative(ax) * rc_window(ax, beta) + sinc(ax) * rc_window_derivative(ax, beta));
}

cplx dirichlet(double x, int N) {
  const double s = std::sin(pi * x / N);
  if (std::abs(s) < 1e-9) {
    cplx acc{0.0, 0.0};
    for (int n = 0; n < N; ++n) acc += std::polar(1.0, 2.0 * pi * x * n / N);
    return acc / static_cast<double>(N);
  }
  return std::polar(std::sin(pi * x) / (N * s), pi * x * (N - 1) / N);
}

cplx dirichlet_derivative(double x, int N) {
  cplx acc{0.0, 0.0};
  for (int n = 1; n < N; ++n) acc += static_cast<double>(n) * std::polar(1.0, 2.0 * pi * x * n / N);
  return cplx{0.0, 2.0 * pi / (static_cast<double>(N) * N)} * acc;
}

double rc_derivative_wrt_lp(int d, int floor_lp, double l_p, double beta, int Q) {
  const double lbar = d + floor_lp - l_p - Q;
  return -rc_derivative(lbar, beta);
}

cplx cp_phase(int m, int d, int n_tilde, int floor_lp, int M, int N) {
  const int idx = m - floor_lp - d;
  if (idx < 0) return std::polar(1.0, -2.0 * pi * n_tilde / N);
  if (idx >= M) return std::polar(1.0, 2.0 * pi * n_tilde / N);
  return {1.0, 0.0};
}

PulseBank::PulseBank(double beta, int Q, int a_span)
    : beta_(beta), Q_(Q), a_span_(a_span > 0 ? a_span : 24 * Q) {
  if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("beta must lie in (0, 1]");
  if (Q < 1) throw ConfigError("Q must be at least 1");
  taps_.resize(2 * Q + 1);
  for (int d = 0; d <= 2 * Q; ++d) taps_[d] = rc(d - Q, beta);
}

double PulseBank::g(double x) const {
  if (std::abs(x) >= Q_ + 1) return 0.0;
  if (x == std::floor(x) && std::abs(x) <= Q_) return taps_[static_cast<int>(x) + Q_];
  return rc(x, beta_);
}

double PulseBank::g_derivative(double x) const {
  if (std::abs(x) >= Q_ + 1) return 0.0;
  return rc_derivative(x, beta_);
}

double PulseBank::a(double t) const {
  if (std::abs(t) > a_span_) return 0.0;
  return srrc(t, beta_);
}

void PulseBank::delay_taps(double l, double* out) const {
  const double fl = std::floor(l);
  const double frac = fl - l;  // in (-1, 0]
  if (frac == 0.0) {
    for (int i = 0; i <= 2 * Q_; ++i) out[i] = taps_[i];
    return;
  }
  for (int i = 0; i <= 2 * Q_; ++i) out[i] = rc(i - Q_ + frac, beta_);
}

void PulseBank::delay_tap_derivatives(double l, double* out) const {
  const double frac = std::floor(l) - l;
  for (int i = 0; i <= 2 * Q_; ++i) out[i] = -rc_derivative(i - Q_ + frac, beta_);
}

}  // namespace ddfmcw
