#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ddfmcw/analysis.hpp"
#include "ddfmcw/dft.hpp"
#include "ddfmcw/pulses.hpp"

namespace ddfmcw {

using std::numbers::pi;

double srrc_spectrum(double f, double beta) {
  const double af = std::abs(f);
  const double lo = 0.5 * (1.0 - beta);
  const double hi = 0.5 * (1.0 + beta);
  if (af <= lo) return 1.0;
  if (af >= hi) return 0.0;
  return 0.5 * (1.0 + std::cos(pi / beta * (af - lo)));
}

PsdValue psd_analytic(double f, const SystemParams& p, const PowerAllocation& pw, const CVec& pilot_seq) {
  const int M = p.M, N = p.N;
  const double A2 = srrc_spectrum(f, p.beta);
  PsdValue v;
  if (A2 == 0.0) return v;
  const double x = static_cast<double>(N) * M * f;
  if (pilot_seq.size() > 0 && pw.E_c > 0.0) {
    if (pilot_seq.size() != M) throw std::invalid_argument("psd: pilot sequence length differs from M");
    cplx c_f{};
    for (int m = 0; m < M; ++m) c_f += pilot_seq[m] * std::polar(1.0, -2.0 * pi * f * m);
    const double varpi = std::norm(c_f);
    v.pilot = pw.E_c * N * varpi * A2 * std::norm(dirichlet(-x, N)) / pilot_seq.squaredNorm();
  }
  if (N > 1) {
    double tones = 0.0;
    for (int n = 1; n < N; ++n) tones += std::norm(dirichlet(n - x, N));
    v.data = pw.E_s * N / (N - 1.0) * A2 * tones;
  }
  v.total = v.pilot + v.data;
  return v;
}

Spectrum periodogram(const Waveform& w, double duration, int nfft) {
  const long n = static_cast<long>(w.samples.size());
  if (n > nfft) throw std::invalid_argument("periodogram: FFT shorter than the waveform");
  if (!(duration > 0.0)) throw std::invalid_argument("periodogram: duration must be positive");
  CVec u = CVec::Zero(nfft);
  for (long i = 0; i < n; ++i) u[i] = w.samples[i];
  dft::transform(std::span<cplx>(u.data(), nfft), dft::Sign::forward);
  Spectrum s;
  s.f.resize(nfft);
  s.psd.resize(nfft);
  const double scale = 1.0 / (static_cast<double>(w.O) * w.O * duration);
  for (int j = 0; j < nfft; ++j) {
    const int k = j - nfft / 2;
    const int idx = (k % nfft + nfft) % nfft;
    s.f[j] = static_cast<double>(k) * w.O / nfft;
    s.psd[j] = std::norm(u[idx]) * scale;
  }
  return s;
}

void accumulate(Spectrum& acc, const Spectrum& s) {
  if (acc.f.empty()) {
    acc = s;
    return;
  }
  if (acc.psd.size() != s.psd.size()) throw std::invalid_argument("accumulate: spectrum sizes differ");
  for (std::size_t i = 0; i < s.psd.size(); ++i) acc.psd[i] += s.psd[i];
}

Waveform linear_fmcw_waveform(int M, int N, int O, double E_c, CyclicExtension ext) {
  if (M < 1 || N < 1 || O < 1) throw ConfigError("linear FMCW: sizes must be positive");
  Waveform w;
  w.O = O;
  w.cp_len = ext.prefix;
  w.cs_len = ext.suffix;
  w.first_index = -static_cast<long>(ext.prefix) * O;
  const long len = static_cast<long>(ext.prefix + static_cast<long>(M) * N + ext.suffix) * O;
  w.samples.resize(len);
  const double amp = std::sqrt(E_c);
  const long period = static_cast<long>(M) * O;
  for (long i = 0; i < len; ++i) {
    const long si = ((w.first_index + i) % period + period) % period;
    const double t = static_cast<double>(si) / O;
    const double cycles = -0.5 * t + t * t / (2.0 * M);
    w.samples[i] = amp * std::polar(1.0, 2.0 * pi * (cycles - std::floor(cycles)));
  }
  return w;
}

double oobe_db(const Spectrum& s, double f0, double width, double beta) {
  double in = 0.0, out = 0.0;
  long n_in = 0, n_out = 0;
  const double edge = 0.5 * (1.0 - beta);
  for (std::size_t i = 0; i < s.f.size(); ++i) {
    const double af = std::abs(s.f[i]);
    if (af < edge) {
      in += s.psd[i];
      ++n_in;
    }
    if (std::abs(af - f0) <= 0.5 * width) {
      out += s.psd[i];
      ++n_out;
    }
  }
  if (n_in == 0 || n_out == 0) throw std::invalid_argument("oobe: frequency grid misses a region");
  return linear_to_db((out / n_out) / (in / n_in));
}

}  // namespace ddfmcw
