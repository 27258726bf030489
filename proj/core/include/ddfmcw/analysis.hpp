#pragma once

#include <vector>

#include "ddfmcw/channel.hpp"
#include "ddfmcw/modem.hpp"

namespace ddfmcw {

// ---- PAPR ----

// Peak over mean power of the samples whose time lies in [begin, end)
// symbol intervals, in dB.
double papr_db(const Waveform& w, long begin, long end);
// Same over the whole sample vector.
double papr_db(const std::vector<cplx>& s);

// Marcum Q-function of order one.
double marcum_q1(double a, double b);
// Tail of |s|^2 / E|s|^2 for one Rician sample with K-factor rho.
double sample_tail(double rho, double gamma0);
// 1 - (1 - sample_tail)^MN, gamma0 linear.
double ccdf_analytic(double rho, long MN, double gamma0);
// gamma0 in dB at which ccdf_analytic reaches `tail`.
double ccdf_analytic_threshold_db(double rho, long MN, double tail);
// Empirical exceedance probability of each threshold (dB).
std::vector<double> empirical_ccdf(const std::vector<double>& papr_db_values, const std::vector<double>& gamma0_db);
// Threshold in dB where the empirical CCDF falls to `tail`, interpolated in dB.
double empirical_threshold_db(std::vector<double> papr_db_values, double tail);

// ---- PSD ----
// Frequencies are in units of M/T; the PSD is per unit of that frequency so
// that it integrates to the mean power.

// Power spectrum of the srrc pulse, |A(f)|^2.
double srrc_spectrum(double f, double beta);

struct PsdValue {
  double pilot = 0.0;
  double data = 0.0;
  double total = 0.0;
};

// E_c and E_s are time-domain powers; data occupies Doppler columns 1..N-1.
PsdValue psd_analytic(double f, const SystemParams& p, const PowerAllocation& pw, const CVec& pilot_seq);

// |S(f)|^2 / duration of one waveform sampled at f_k = k O / nfft, k in
// [-nfft/2, nfft/2).
struct Spectrum {
  std::vector<double> f;
  std::vector<double> psd;
};
Spectrum periodogram(const Waveform& w, double duration, int nfft);
void accumulate(Spectrum& acc, const Spectrum& s);

// Chirp train exp(j2pi(f0 t + eps t^2 / 2)) repeated N times, time in T/M
// units with f0 = -1/2 and eps = 1/M, scaled to power E_c.
Waveform linear_fmcw_waveform(int M, int N, int O, double E_c, CyclicExtension ext = {});

// Mean PSD over |f| in [f0 - w/2, f0 + w/2] (both signs) relative to the
// mean over |f| < (1 - beta) / 2, in dB.
double oobe_db(const Spectrum& s, double f0, double width, double beta);

// ---- Ambiguity ----

struct AmbiguitySurface {
  std::vector<double> tau;  // T/M units
  std::vector<double> nu;   // M/T units
  CMat values;              // tau rows, nu columns
};

// A(tau, nu) = int tx(t) ref*(t - tau) exp(-j2pi nu (t - tau)) dt on the
// waveform sample grid; tau = s / O for s in [s_min, s_max] step s_step, nu
// on the nfft-point grid restricted to |nu| <= nu_max.
AmbiguitySurface ambiguity_numeric(const Waveform& tx, const Waveform& ref, long s_min, long s_max, long s_step,
                                   int nfft, double nu_max);
cplx ambiguity_point(const Waveform& tx, const Waveform& ref, long s, double nu);

// Separable approximation built from g and the cyclic autocorrelation of the
// pilot sequence.
cplx ambiguity_dd_approx(double tau, double nu, const SystemParams& p, const Pilot& pilot, const PulseBank& pb);

// Max of |A| / |A(0,0)| in dB over |tau| <= tau_max, |nu| <= nu_max, away
// from the delay and Doppler axes by at least tau_guard and nu_guard.
double off_axis_sidelobe_db(const AmbiguitySurface& s, double tau_max, double nu_max, double tau_guard,
                            double nu_guard);

// Delay ambiguity of a single linear chirp (time-bandwidth M) against
// itself and against the same chirp continued beyond [0, T), on tau = i / O.
struct ChirpCompression {
  std::vector<double> tau;
  std::vector<double> practical;  // |A_c(tau)| / M
  std::vector<double> ideal;      // |A_{c_ext, c}(tau)| / M
};
ChirpCompression chirp_compression_curves(int M, int O);
// Largest value of `curve` outside the mainlobe |tau| < guard.
double max_sidelobe(const std::vector<double>& tau, const std::vector<double>& curve, double guard);

// ---- Fisher information and CRB ----
// Parameters are ordered per path as (|h|, arg h, l, k).

Eigen::MatrixXd fisher(const std::vector<PathParams>& paths, const DDFrame& X, double sigma_z2,
                       const SystemParams& p, const PulseBank& pb);

struct CrbResult {
  Eigen::VectorXd bounds;
  double condition = 1.0;
  bool singular = false;
  double delay(int path) const { return bounds[4 * path + 2]; }
  double doppler(int path) const { return bounds[4 * path + 3]; }
};

CrbResult crb_from_fisher(const Eigen::MatrixXd& F);
CrbResult crb(const std::vector<PathParams>& paths, const DDFrame& X, double sigma_z2, const SystemParams& p,
              const PulseBank& pb);

// sqrt of the path-averaged delay and Doppler bounds over the normalizers.
struct NrmseBound {
  double delay = 0.0;
  double doppler = 0.0;
};
NrmseBound crb_nrmse(const CrbResult& c, double l_norm, double k_norm);

}  // namespace ddfmcw
