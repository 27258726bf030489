#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ddfmcw/analysis.hpp"
#include "ddfmcw/chirp.hpp"
#include "ddfmcw/dft.hpp"
#include "ddfmcw/pulses.hpp"

namespace ddfmcw {

using std::numbers::pi;

namespace {

inline cplx unit_phase(double cycles) { return std::polar(1.0, 2.0 * pi * (cycles - std::floor(cycles))); }

}  // namespace

AmbiguitySurface ambiguity_numeric(const Waveform& tx, const Waveform& ref, long s_min, long s_max, long s_step,
                                   int nfft, double nu_max) {
  if (tx.O != ref.O) throw std::invalid_argument("ambiguity: oversampling factors differ");
  if (s_step < 1 || s_max < s_min) throw std::invalid_argument("ambiguity: empty delay grid");
  const long nr = static_cast<long>(ref.samples.size());
  const long nt = static_cast<long>(tx.samples.size());
  if (nr > nfft) throw std::invalid_argument("ambiguity: FFT shorter than the reference");
  const int O = ref.O;

  AmbiguitySurface out;
  std::vector<int> bins;
  for (int j = 0; j < nfft; ++j) {
    const int k = j - nfft / 2;
    const double nu = static_cast<double>(k) * O / nfft;
    if (std::abs(nu) <= nu_max) {
      bins.push_back((k % nfft + nfft) % nfft);
      out.nu.push_back(nu);
    }
  }
  for (long s = s_min; s <= s_max; s += s_step) out.tau.push_back(static_cast<double>(s) / O);
  out.values.resize(static_cast<Eigen::Index>(out.tau.size()), static_cast<Eigen::Index>(bins.size()));

  std::vector<cplx> ref_phase(bins.size());
  for (std::size_t b = 0; b < bins.size(); ++b) ref_phase[b] = unit_phase(-out.nu[b] * ref.first_index / O) / double(O);

  CVec u(nfft);
  Eigen::Index row = 0;
  for (long s = s_min; s <= s_max; s += s_step, ++row) {
    u.setZero();
    const long off = ref.first_index + s - tx.first_index;
    for (long j = 0; j < nr; ++j) {
      const long i = j + off;
      if (i >= 0 && i < nt) u[j] = tx.samples[i] * std::conj(ref.samples[j]);
    }
    dft::transform(std::span<cplx>(u.data(), nfft), dft::Sign::forward);
    for (std::size_t b = 0; b < bins.size(); ++b) out.values(row, static_cast<Eigen::Index>(b)) = u[bins[b]] * ref_phase[b];
  }
  return out;
}

cplx ambiguity_point(const Waveform& tx, const Waveform& ref, long s, double nu) {
  if (tx.O != ref.O) throw std::invalid_argument("ambiguity: oversampling factors differ");
  const long nr = static_cast<long>(ref.samples.size());
  const long nt = static_cast<long>(tx.samples.size());
  const long off = ref.first_index + s - tx.first_index;
  cplx acc{};
  for (long j = 0; j < nr; ++j) {
    const long i = j + off;
    if (i < 0 || i >= nt) continue;
    acc += tx.samples[i] * std::conj(ref.samples[j]) *
           unit_phase(-nu * static_cast<double>(ref.first_index + j) / ref.O);
  }
  return acc / static_cast<double>(ref.O);
}

cplx ambiguity_dd_approx(double tau, double nu, const SystemParams& p, const Pilot& pilot, const PulseBank& pb) {
  const int M = p.M, N = p.N;
  const CVec& c = pilot.column;
  const double scale = 1.0 / N;
  cplx acc{};
  const int lo = static_cast<int>(std::floor(-tau - pb.Q() - 1));
  const int hi = static_cast<int>(std::ceil(-tau + pb.Q() + 1));
  for (int zeta = lo; zeta <= hi; ++zeta) {
    const double gv = pb.g(tau + zeta);
    if (gv == 0.0) continue;
    cplx r{};
    for (int m = 0; m < M; ++m) {
      const int mz = ((m + zeta) % M + M) % M;
      r += unit_phase(-nu * m) * c[m] * std::conj(c[mz]);
    }
    acc += gv * r;
  }
  return scale * unit_phase(nu * tau) * static_cast<double>(N) * dirichlet(-nu * N * M, N) * acc;
}

double off_axis_sidelobe_db(const AmbiguitySurface& s, double tau_max, double nu_max, double tau_guard,
                            double nu_guard) {
  Eigen::Index r0 = 0, c0 = 0;
  for (std::size_t i = 0; i < s.tau.size(); ++i)
    if (std::abs(s.tau[i]) < std::abs(s.tau[r0])) r0 = static_cast<Eigen::Index>(i);
  for (std::size_t j = 0; j < s.nu.size(); ++j)
    if (std::abs(s.nu[j]) < std::abs(s.nu[c0])) c0 = static_cast<Eigen::Index>(j);
  const double peak = std::abs(s.values(r0, c0));
  if (!(peak > 0.0)) throw std::invalid_argument("sidelobe: zero peak");
  double worst = 0.0;
  for (std::size_t i = 0; i < s.tau.size(); ++i) {
    const double at = std::abs(s.tau[i]);
    if (at > tau_max || at < tau_guard) continue;
    for (std::size_t j = 0; j < s.nu.size(); ++j) {
      const double an = std::abs(s.nu[j]);
      if (an > nu_max || an < nu_guard) continue;
      worst = std::max(worst, std::abs(s.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
    }
  }
  return 20.0 * std::log10(std::max(worst, 1e-300) / peak);
}

ChirpCompression chirp_compression_curves(int M, int O) {
  if (M < 2 || O < 1) throw ConfigError("chirp compression: invalid sizes");
  const long L = static_cast<long>(M) * O;
  auto chirp = [&](long i) {
    const double t = static_cast<double>(i) / O;
    return unit_phase(-0.5 * t + t * t / (2.0 * M));
  };
  std::vector<cplx> c(L);
  for (long i = 0; i < L; ++i) c[i] = chirp(i);
  ChirpCompression out;
  for (long s = -L + 1; s < L; ++s) {
    cplx prac{}, ideal{};
    for (long j = 0; j < L; ++j) {
      const long i = j + s;
      const cplx ref = std::conj(c[j]);
      ideal += chirp(i) * ref;
      if (i >= 0 && i < L) prac += c[i] * ref;
    }
    out.tau.push_back(static_cast<double>(s) / O);
    out.practical.push_back(std::abs(prac) / (static_cast<double>(O) * M));
    out.ideal.push_back(std::abs(ideal) / (static_cast<double>(O) * M));
  }
  return out;
}

double max_sidelobe(const std::vector<double>& tau, const std::vector<double>& curve, double guard) {
  double m = 0.0;
  for (std::size_t i = 0; i < tau.size(); ++i)
    if (std::abs(tau[i]) >= guard) m = std::max(m, curve[i]);
  return m;
}

}  // namespace ddfmcw
