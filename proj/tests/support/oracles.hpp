#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "ddfmcw/params.hpp"
#include "ddfmcw/rng.hpp"

namespace oracle {

using ddfmcw::cplx;
using ddfmcw::CMat;
using ddfmcw::CVec;
using std::numbers::pi;

inline CMat random_frame(ddfmcw::Rng& rng, int M, int N) {
  CMat X(M, N);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = ddfmcw::complex_normal(rng, 1.0);
  return X;
}

inline CVec random_vector(ddfmcw::Rng& rng, long n) {
  CVec v(n);
  for (long i = 0; i < n; ++i) v[i] = ddfmcw::complex_normal(rng, 1.0);
  return v;
}

// s[m + nd M] = N^{-1/2} sum_n X[m, n] exp(j 2 pi n nd / N)
inline CVec modulate(const CMat& X) {
  const int M = static_cast<int>(X.rows()), N = static_cast<int>(X.cols());
  CVec s = CVec::Zero(static_cast<Eigen::Index>(M) * N);
  for (int nd = 0; nd < N; ++nd)
    for (int m = 0; m < M; ++m)
      for (int n = 0; n < N; ++n)
        s[nd * M + m] += X(m, n) * std::polar(1.0, 2.0 * pi * n * nd / N) / std::sqrt(double(N));
  return s;
}

// e^{j pi m^2 / M} for any M
inline CVec chirp(int M) {
  CVec c(M);
  for (int m = 0; m < M; ++m) c[m] = std::polar(1.0, pi * std::fmod(double(m) * m, 2.0 * M) / M);
  return c;
}

// Standard square-root raised cosine with unit energy, evaluated away from
// its removable singularities only.
inline double srrc_textbook(double t, double b) {
  const double num = std::sin(pi * t * (1 - b)) + 4 * b * t * std::cos(pi * t * (1 + b));
  const double den = pi * t * (1 - 16 * b * b * t * t);
  return num / den;
}

inline double rc_textbook(double t, double b) {
  const double s = t == 0.0 ? 1.0 : std::sin(pi * t) / (pi * t);
  return s * std::cos(pi * b * t) / (1 - 4 * b * b * t * t);
}

// Q1(a, b) = int_b^inf x exp(-(x^2 + a^2)/2) I0(a x) dx by composite Simpson.
inline double marcum_q1_integral(double a, double b) {
  const double hi = std::max(b, a) + 40.0;
  const int n = 200000;
  const double h = (hi - b) / n;
  auto f = [&](double x) {
    const double ax = a * x;
    // exp(-(x-a)^2/2) * exp(-ax) I0(ax) keeps the product finite
    const double scaled = ax < 600 ? std::exp(-ax) * std::cyl_bessel_i(0.0, ax) : 1.0 / std::sqrt(2 * pi * ax);
    return x * std::exp(-0.5 * (x - a) * (x - a)) * scaled;
  };
  double acc = f(b) + f(hi);
  for (int i = 1; i < n; ++i) acc += f(b + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

inline double max_abs(const CMat& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace oracle
