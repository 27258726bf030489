#include "ddfmcw/modem.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

#include "ddfmcw/dft.hpp"

namespace ddfmcw {

std::pair<long, long> Waveform::body(long begin, long end) const {
  const long n = static_cast<long>(samples.size());
  long lo = begin * O - first_index;
  long hi = end * O - first_index;
  lo = std::clamp(lo, 0L, n);
  hi = std::clamp(hi, 0L, n);
  return {lo, hi};
}

TimeSampleVector oddm_modulate(const DDFrame& X) {
  CMat xdt = X.grid;
  dft::rows_backward(xdt);
  return Eigen::Map<const CVec>(xdt.data(), xdt.size());
}

DDFrame oddm_demodulate(const TimeSampleVector& r, int M, int N) {
  if (r.size() != static_cast<Eigen::Index>(M) * N) {
    throw std::invalid_argument("demodulate: sample count does not match M*N");
  }
  CMat y = Eigen::Map<const CMat>(r.data(), M, N);
  dft::rows_forward(y);
  return DDFrame(std::move(y), FrameRole::received);
}

int good_fft_size(int n) {
  for (int c = std::max(n, 1);; ++c) {
    int v = c;
    for (int f : {2, 3, 5})
      while (v % f == 0) v /= f;
    if (v == 1) return c;
  }
}

namespace {

// FFT of the sampled srrc, cached per thread.
const CVec& pulse_spectrum(const PulseBank& pb, int O, int nfft) {
  using Key = std::tuple<double, int, int, int>;
  thread_local std::map<Key, CVec> cache;
  const Key key{pb.beta(), pb.a_span(), O, nfft};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  if (cache.size() > 16) cache.clear();
  const long K = static_cast<long>(O) * pb.a_span();
  CVec h = CVec::Zero(nfft);
  for (long k = -K; k <= K; ++k) h[(k + K)] = pb.a(static_cast<double>(k) / O);
  dft::transform(std::span<cplx>(h.data(), nfft), dft::Sign::forward);
  return cache.emplace(key, std::move(h)).first->second;
}

}  // namespace

Waveform synthesize_waveform(const TimeSampleVector& s, const PulseBank& pb, int O,
                             CyclicExtension ext) {
  if (O < 1) throw ConfigError("oversampling factor must be positive");
  const long MN = s.size();
  if (ext.prefix < 0 || ext.suffix < 0 || ext.prefix > MN || ext.suffix > MN) {
    throw ConfigError("cyclic extension longer than the frame");
  }
  const long Lx = ext.prefix + MN + ext.suffix;
  const long K = static_cast<long>(O) * pb.a_span();
  const long out_len = O * (Lx - 1) + 2 * K + 1;
  const int nfft = good_fft_size(static_cast<int>(out_len));

  CVec u = CVec::Zero(nfft);
  for (long j = 0; j < Lx; ++j) {
    const long q = ((j - ext.prefix) % MN + MN) % MN;
    u[j * O] = s[q];
  }
  dft::transform(std::span<cplx>(u.data(), nfft), dft::Sign::forward);
  u.array() *= pulse_spectrum(pb, O, nfft).array();
  dft::transform(std::span<cplx>(u.data(), nfft), dft::Sign::backward);

  Waveform w;
  w.O = O;
  w.cp_len = ext.prefix;
  w.cs_len = ext.suffix;
  w.first_index = -static_cast<long>(ext.prefix) * O - K;
  w.samples.resize(out_len);
  const double scale = 1.0 / nfft;
  for (long i = 0; i < out_len; ++i) w.samples[i] = u[i] * scale;
  return w;
}

Waveform synthesize_waveform(const TimeSampleVector& s, const SystemParams& p, const PulseBank& pb,
                             bool with_cp) {
  return synthesize_waveform(s, pb, p.O, CyclicExtension{with_cp ? p.l_max : 0, 0});
}

TimeSampleVector matched_filter_sample(const Waveform& w, const PulseBank& pb, int MN) {
  const long O = w.O;
  const long K = O * pb.a_span();
  const long n = static_cast<long>(w.samples.size());
  if (w.first_index > 0 || w.first_index + n - 1 < O * (MN - 1)) {
    throw std::invalid_argument("matched filter: waveform does not cover the frame");
  }
  std::vector<double> h(2 * K + 1);
  for (long k = -K; k <= K; ++k) h[k + K] = pb.a(static_cast<double>(k) / O);
  TimeSampleVector r(MN);
  for (long q = 0; q < MN; ++q) {
    cplx acc{0.0, 0.0};
    const long centre = O * q - w.first_index;
    const long lo = std::max(-K, -centre);
    const long hi = std::min(K, n - 1 - centre);
    for (long k = lo; k <= hi; ++k) acc += w.samples[centre + k] * h[k + K];
    r[q] = acc / static_cast<double>(O);
  }
  return r;
}

}  // namespace ddfmcw
