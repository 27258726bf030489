#include "ddfmcw/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace ddfmcw {

using std::numbers::pi;

namespace {

inline long floor_div(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline cplx unit_phase(double cycles) { return std::polar(1.0, 2.0 * pi * (cycles - std::floor(cycles))); }

enum class Mode { value, d_l, d_k };

// Accumulates one path of the DD relation into Yt, which holds the response
// transposed (N x M) so that every delay row is a contiguous column.
void accumulate_path(const CMat& X, const PathParams& path, const PulseBank& pb, Mode mode, CMat& Yt) {
  const int M = static_cast<int>(X.rows()), N = static_cast<int>(X.cols());
  const int Q = pb.Q();
  const long MN = static_cast<long>(M) * N;
  const double l = path.l, k = path.k;
  const long fl = static_cast<long>(std::floor(l));

  std::vector<double> taps(2 * Q + 1), dtaps;
  pb.delay_taps(l, taps.data());
  if (mode == Mode::d_l) {
    dtaps.resize(2 * Q + 1);
    pb.delay_tap_derivatives(l, dtaps.data());
  }

  // phi(u + k) for u = ntilde - n in [-(N-1), N-1]
  std::vector<cplx> phi(2 * N - 1), dphi;
  for (int u = -(N - 1); u <= N - 1; ++u) phi[u + N - 1] = dirichlet(u + k, N);
  if (mode == Mode::d_k) {
    dphi.resize(2 * N - 1);
    for (int u = -(N - 1); u <= N - 1; ++u) dphi[u + N - 1] = dirichlet_derivative(u + k, N);
  }

  const long i_lo = 0 - fl - Q, i_hi = (M - 1) - fl + Q;
  const long w_lo = floor_div(i_lo, M), w_hi = floor_div(i_hi, M);
  const int nw = static_cast<int>(w_hi - w_lo + 1);

  // Wt[w] (N x M): Wt[n, i] = sum_nt phi(nt + k - n) e^{j2pi w nt/N} X[i, nt]
  std::vector<CMat> Wt(nw), dWt;
  if (mode == Mode::d_k) dWt.resize(nw);
  CMat Phi(N, N);
  for (int wi = 0; wi < nw; ++wi) {
    const long w = w_lo + wi;
    for (int nt = 0; nt < N; ++nt) {
      const cplx psi = unit_phase(static_cast<double>(w * nt % N) / N);
      for (int n = 0; n < N; ++n) Phi(n, nt) = phi[nt - n + N - 1] * psi;
    }
    Wt[wi].noalias() = Phi * X.transpose();
    if (mode == Mode::d_k) {
      for (int nt = 0; nt < N; ++nt) {
        const cplx psi = unit_phase(static_cast<double>(w * nt % N) / N);
        for (int n = 0; n < N; ++n) Phi(n, nt) = dphi[nt - n + N - 1] * psi;
      }
      dWt[wi].noalias() = Phi * X.transpose();
    }
  }

  const double kmn = k / static_cast<double>(MN);
  for (int m = 0; m < M; ++m) {
    for (int dd = -Q; dd <= Q; ++dd) {
      const long i = m - fl - dd;
      const long w = floor_div(i, M);
      const long src = i - w * M;
      const int wi = static_cast<int>(w - w_lo);
      const double t = m - l - dd;
      const cplx ph = unit_phase(kmn * t);
      const double g = taps[dd + Q];
      switch (mode) {
        case Mode::value:
          Yt.col(m) += (path.h * ph * g) * Wt[wi].col(src);
          break;
        case Mode::d_l: {
          const cplx c = ph * (dtaps[dd + Q] - cplx(0.0, 2.0 * pi * kmn) * g);
          Yt.col(m) += (path.h * c) * Wt[wi].col(src);
          break;
        }
        case Mode::d_k: {
          const cplx c = path.h * ph * g;
          const cplx lin(0.0, 2.0 * pi * t / static_cast<double>(MN));
          Yt.col(m) += c * (dWt[wi].col(src) + lin * Wt[wi].col(src));
          break;
        }
      }
    }
  }
}

}  // namespace

ChannelProfile ChannelProfile::from_physical(double tau_max, double nu_max, const SystemParams& p, int P) {
  ChannelProfile c;
  c.l_max_chan = tau_max * p.M / p.T;
  c.k_max = nu_max * p.N * p.T;
  c.P = P;
  return c;
}

ChannelRealization sample_channel(Rng& rng, int P, double l_max_chan, double k_max) {
  if (P < 1) throw ConfigError("path count must be at least 1");
  ChannelRealization c;
  c.paths.resize(P);
  for (auto& path : c.paths) {
    path.l = uniform(rng, 0.0, l_max_chan);
    path.k = uniform(rng, -k_max, k_max);
    path.h = complex_normal(rng, 1.0 / P);
  }
  return c;
}

TimeSampleVector apply_channel_noiseless(const TimeSampleVector& s, const std::vector<PathParams>& paths,
                                         const SystemParams& p, const PulseBank& pb) {
  const long MN = s.size();
  if (MN != p.frame_size()) throw std::invalid_argument("channel: sample count does not match M*N");
  const int Q = pb.Q();
  TimeSampleVector r = TimeSampleVector::Zero(MN);
  std::vector<double> taps(2 * Q + 1);
  for (const auto& path : paths) {
    const long fl = static_cast<long>(std::floor(path.l));
    pb.delay_taps(path.l, taps.data());
    const double kmn = path.k / static_cast<double>(MN);
    for (long q = 0; q < MN; ++q) {
      cplx acc{0.0, 0.0};
      for (int dd = -Q; dd <= Q; ++dd) {
        long src = (q - fl - dd) % MN;
        if (src < 0) src += MN;
        acc += unit_phase(kmn * (q - path.l - dd)) * taps[dd + Q] * s[src];
      }
      r[q] += path.h * acc;
    }
  }
  return r;
}

TimeSampleVector apply_channel_symbol_rate(const TimeSampleVector& s, const ChannelRealization& chan,
                                           const SystemParams& p, const PulseBank& pb, Rng& rng) {
  TimeSampleVector r = apply_channel_noiseless(s, chan.paths, p, pb);
  add_noise(r, chan.sigma_z2, rng);
  return r;
}

DDFrame dd_response(const DDFrame& X, const std::vector<PathParams>& paths, const SystemParams& p,
                    const PulseBank& pb) {
  if (X.M() != p.M || X.N() != p.N) throw std::invalid_argument("dd_response: frame size mismatch");
  CMat Yt = CMat::Zero(p.N, p.M);
  for (const auto& path : paths) accumulate_path(X.grid, path, pb, Mode::value, Yt);
  return DDFrame(Yt.transpose(), FrameRole::received);
}

PathDerivatives dd_response_derivatives(const DDFrame& X, const PathParams& path, const SystemParams& p,
                                        const PulseBank& pb) {
  if (X.M() != p.M || X.N() != p.N) throw std::invalid_argument("derivatives: frame size mismatch");
  PathDerivatives out;
  PathParams unit = path;
  unit.h = 1.0;
  CMat Yt = CMat::Zero(p.N, p.M);
  accumulate_path(X.grid, unit, pb, Mode::value, Yt);
  out.unit = Yt.transpose();
  Yt.setZero();
  accumulate_path(X.grid, path, pb, Mode::d_l, Yt);
  out.d_l = Yt.transpose();
  Yt.setZero();
  accumulate_path(X.grid, path, pb, Mode::d_k, Yt);
  out.d_k = Yt.transpose();
  return out;
}

Waveform apply_channel_continuous(const TimeSampleVector& s, const std::vector<PathParams>& paths,
                                  const PulseBank& pb, int O, CyclicExtension ext) {
  const long MN = s.size();
  const long span = pb.a_span();
  double lmax = 0.0;
  for (const auto& path : paths) lmax = std::max(lmax, path.l);
  const long j_lo = -ext.prefix, j_hi = MN - 1 + ext.suffix;
  const long t_lo = j_lo - span;
  const long t_hi = j_hi + static_cast<long>(std::ceil(lmax)) + span;

  Waveform w;
  w.O = O;
  w.cp_len = ext.prefix;
  w.cs_len = ext.suffix;
  w.first_index = t_lo * O;
  const long n = (t_hi - t_lo) * O + 1;
  w.samples.assign(n, cplx{0.0, 0.0});

  auto ext_at = [&](long j) -> cplx {
    if (j < j_lo || j > j_hi) return {0.0, 0.0};
    long q = j % MN;
    if (q < 0) q += MN;
    return s[q];
  };

  for (const auto& path : paths) {
    for (int rho = 0; rho < O; ++rho) {
      const double delta = static_cast<double>(rho) / O - path.l;
      const long n_lo = static_cast<long>(std::ceil(-span - delta));
      const long n_hi = static_cast<long>(std::floor(span - delta));
      std::vector<double> tab(n_hi - n_lo + 1);
      for (long m = n_lo; m <= n_hi; ++m) tab[m - n_lo] = srrc(m + delta, pb.beta());
      for (long a = t_lo; a < t_hi + 1; ++a) {
        const long i = (a - t_lo) * O + rho;
        if (i >= n) break;
        cplx acc{0.0, 0.0};
        for (long m = n_lo; m <= n_hi; ++m) {
          const long j = a - m;
          if (j < j_lo || j > j_hi) continue;
          acc += tab[m - n_lo] * ext_at(j);
        }
        const double t = a + static_cast<double>(rho) / O;
        w.samples[i] += path.h * unit_phase(path.k * (t - path.l) / static_cast<double>(MN)) * acc;
      }
    }
  }
  return w;
}

AtomDictionary::AtomDictionary(const Pilot& pilot, const SystemParams& p, const PulseBank& pb, int level,
                               std::size_t capacity)
    : pilot_(pilot), p_(p), pb_(pb), level_(level), capacity_(capacity) {}

CVec AtomDictionary::compute(double l, double k) const {
  if (!(l >= 0.0) || !(l < p_.l_max) || !std::isfinite(k)) {
    throw std::out_of_range("atom: delay must lie in [0, l_max)");
  }
  const int M = p_.M, N = p_.N, Q = pb_.Q();
  const long MN = static_cast<long>(M) * N;
  const long fl = static_cast<long>(std::floor(l));
  std::vector<double> taps(2 * Q + 1);
  pb_.delay_taps(l, taps.data());
  const double kmn = k / static_cast<double>(MN);
  CVec u = CVec::Zero(M);
  for (int m = 0; m < M; ++m) {
    cplx acc{0.0, 0.0};
    for (int dd = -Q; dd <= Q; ++dd) {
      long src = (m - fl - dd) % M;
      if (src < 0) src += M;
      const cplx x = pilot_.column[src];
      if (x == cplx{0.0, 0.0}) continue;
      acc += unit_phase(kmn * (m - l - dd)) * taps[dd + Q] * x;
    }
    u[m] = acc;
  }
  CVec a(MN);
  for (int n = 0; n < N; ++n) {
    const cplx ph = dirichlet(k - n, N);
    a.segment(static_cast<long>(n) * M, M) = ph * u;
  }
  return a;
}

const CVec& AtomDictionary::atom(double l, double k) {
  const double scale = std::ldexp(1.0, level_);
  const double ql = l * scale, qk = k * scale;
  if (ql != std::round(ql) || qk != std::round(qk) || std::abs(qk) > 1e9 || ql > 1e9) {
    scratch_ = compute(l, k);
    return scratch_;
  }
  const std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::int64_t>(ql)) << 32) ^
                            static_cast<std::uint64_t>(static_cast<std::uint32_t>(static_cast<std::int64_t>(qk)));
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  if (cache_.size() >= capacity_) cache_.clear();
  return cache_.emplace(key, compute(l, k)).first->second;
}

void add_noise(CVec& v, double sigma_z2, Rng& rng) {
  if (sigma_z2 < 0.0) throw ConfigError("noise variance must be non-negative");
  if (sigma_z2 == 0.0) return;
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += complex_normal(rng, sigma_z2);
}

void add_noise(DDFrame& f, double sigma_z2, Rng& rng) {
  if (sigma_z2 < 0.0) throw ConfigError("noise variance must be non-negative");
  if (sigma_z2 == 0.0) return;
  for (Eigen::Index i = 0; i < f.grid.size(); ++i) f.grid.data()[i] += complex_normal(rng, sigma_z2);
}

double noise_variance(double Es, double esn0_db) { return Es * std::pow(10.0, -esn0_db / 10.0); }

std::string channel_to_json(const ChannelRealization& c) {
  nlohmann::json j;
  j["schema"] = 1;
  j["sigma_z2"] = c.sigma_z2;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : c.paths) arr.push_back({p.h.real(), p.h.imag(), p.l, p.k});
  j["paths"] = arr;
  return j.dump();
}

ChannelRealization channel_from_json(const std::string& text) {
  ChannelRealization c;
  try {
    const auto j = nlohmann::json::parse(text);
    c.sigma_z2 = j.value("sigma_z2", 0.0);
    for (const auto& e : j.at("paths")) {
      if (e.size() != 4) throw ConfigError("channel path must be [re, im, l, k]");
      c.paths.push_back({cplx(e[0].get<double>(), e[1].get<double>()), e[2].get<double>(), e[3].get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid channel JSON: ") + e.what());
  }
  return c;
}

}  // namespace ddfmcw
