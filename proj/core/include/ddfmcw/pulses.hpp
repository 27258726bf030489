#pragma once

#include <vector>

#include "ddfmcw/params.hpp"

// All pulse arguments are in units of the delay resolution T/M.
namespace ddfmcw {

double sinc(double x);             // sin(pi x)/(pi x)
double sinc_derivative(double x);  // d/dx sinc(x)

// Unit-energy square-root raised cosine.
double srrc(double t, double beta);
// Raised cosine, the autocorrelation of srrc; rc(0) = 1.
double rc(double x, double beta);
double rc_derivative(double x, double beta);

// (1/N) sum_{n=0}^{N-1} exp(j 2 pi x n / N)
cplx dirichlet(double x, int N);
// d/dx of dirichlet(x, N)
cplx dirichlet_derivative(double x, int N);

// Partial derivative of rc(lbar) with respect to the path delay l_p, where
// lbar = d + floor_lp - l_p - Q and d runs over 0..2Q.
double rc_derivative_wrt_lp(int d, int floor_lp, double l_p, double beta, int Q);

// Phase picked up by symbols that wrap through the cyclic prefix.
cplx cp_phase(int m, int d, int n_tilde, int floor_lp, int M, int N);

class PulseBank {
 public:
  PulseBank(double beta, int Q, int a_span = 0);
  explicit PulseBank(const SystemParams& p) : PulseBank(p.beta, p.Q) {}

  double beta() const { return beta_; }
  int Q() const { return Q_; }
  int a_span() const { return a_span_; }

  // g at integer offsets d - Q, d = 0..2Q.
  const std::vector<double>& taps() const { return taps_; }
  // Continuous g, zero outside the 2Q+1 tap window around a fractional delay.
  double g(double x) const;
  double g_derivative(double x) const;
  // Continuous srrc, zero beyond a_span symbol intervals.
  double a(double t) const;

  // rc(d + floor(l) - l) for centred d = -Q..Q, written into out[0..2Q].
  void delay_taps(double l, double* out) const;
  void delay_tap_derivatives(double l, double* out) const;

 private:
  double beta_;
  int Q_;
  int a_span_;
  std::vector<double> taps_;
};

}  // namespace ddfmcw
