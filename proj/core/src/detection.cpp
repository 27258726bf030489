#include "ddfmcw/detection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "ddfmcw/dft.hpp"

namespace ddfmcw {

using std::numbers::pi;

namespace {

inline long wrap(long i, long n) {
  i %= n;
  return i < 0 ? i + n : i;
}

inline cplx unit_phase(double cycles) { return std::polar(1.0, 2.0 * pi * (cycles - std::floor(cycles))); }

// Banded storage of C = G diag(v) G^H: band(delta + span, i) = C(i, i + delta).
class BandCovariance {
 public:
  BandCovariance(const EffectiveChannel& G) : G_(G), span_(G.span()), MN_(G.MN()) {
    band_ = CMat::Zero(2 * span_ + 1, MN_);
    alias_ = 2L * span_ >= MN_;
  }

  void add_column(long j, double w) {
    if (w == 0.0) return;
    const auto& off = G_.offsets();
    const int L = G_.L_g();
    const auto t = G_.taps().col(j);
    for (int a = 0; a < L; ++a) {
      const cplx ta = w * t[a];
      if (ta == cplx{}) continue;
      const long i = wrap(j + off[a], MN_);
      cplx* col = band_.col(i).data();
      for (int b = 0; b < L; ++b) col[off[b] - off[a] + span_] += ta * std::conj(t[b]);
    }
  }

  void rebuild(const Eigen::VectorXd& v_row, int M) {
    band_.setZero();
    for (long j = 0; j < MN_; ++j) add_column(j, v_row[j % M]);
  }

  void extract(long q, double diag, CMat& C) const {
    const auto& off = G_.offsets();
    const int L = G_.L_g();
    C.resize(L, L);
    for (int a = 0; a < L; ++a) {
      const long ra = wrap(q + off[a], MN_);
      const cplx* col = band_.col(ra).data();
      for (int b = 0; b < L; ++b) {
        const long d0 = off[b] - off[a];
        if (!alias_) {
          C(a, b) = col[d0 + span_];
        } else {
          cplx acc{};
          for (long t = -2; t <= 2; ++t) {
            const long d = d0 + t * MN_;
            if (d >= -span_ && d <= span_) acc += col[d + span_];
          }
          C(a, b) = acc;
        }
      }
      C(a, a) += diag;
    }
  }

 private:
  const EffectiveChannel& G_;
  long span_;
  long MN_;
  bool alias_;
  CMat band_;
};

}  // namespace

EffectiveChannel::EffectiveChannel(int M, int N, std::vector<int> offsets, CMat taps)
    : M_(M), N_(N), offsets_(std::move(offsets)), taps_(std::move(taps)) {}

long EffectiveChannel::row(long q, int o_idx) const { return wrap(q + offsets_[o_idx], MN()); }

CVec EffectiveChannel::apply(const CVec& s) const {
  const long n = MN();
  if (s.size() != n) throw std::invalid_argument("effective channel: length mismatch");
  CVec r = CVec::Zero(n);
  const int L = L_g();
  for (long j = 0; j < n; ++j) {
    const cplx sj = s[j];
    if (sj == cplx{}) continue;
    for (int a = 0; a < L; ++a) r[wrap(j + offsets_[a], n)] += taps_(a, j) * sj;
  }
  return r;
}

EffectiveChannel::SubChannel EffectiveChannel::sub_channel(long q) const {
  const long n = MN();
  const int L = L_g();
  const int sp = span();
  if (2L * sp >= n) throw std::logic_error("sub-channel extraction needs 2*span < MN");
  std::map<int, int> idx;
  for (int a = 0; a < L; ++a) idx[offsets_[a]] = a;
  SubChannel sc;
  for (int a = 0; a < L; ++a) sc.rows.push_back(wrap(q + offsets_[a], n));
  for (int b = 0; b <= 2 * sp; ++b) sc.cols.push_back(wrap(q - sp + b, n));
  sc.G = CMat::Zero(L, 2 * sp + 1);
  for (int a = 0; a < L; ++a) {
    for (int b = 0; b <= 2 * sp; ++b) {
      const int o = offsets_[a] + sp - b;
      auto it = idx.find(o);
      if (it != idx.end()) sc.G(a, b) = taps_(it->second, sc.cols[b]);
    }
  }
  return sc;
}

CMat EffectiveChannel::dense() const {
  const long n = MN();
  CMat G = CMat::Zero(n, n);
  for (long j = 0; j < n; ++j)
    for (int a = 0; a < L_g(); ++a) G(wrap(j + offsets_[a], n), j) += taps_(a, j);
  return G;
}

EffectiveChannel build_effective_channel(const std::vector<PathParams>& paths, const SystemParams& p,
                                         const PulseBank& pb) {
  const int M = p.M, N = p.N, Q = pb.Q();
  const long MN = static_cast<long>(M) * N;
  if (paths.empty()) return EffectiveChannel(M, N, {}, CMat(0, MN));
  std::vector<int> offs;
  for (const auto& path : paths) {
    const int fl = static_cast<int>(std::floor(path.l));
    for (int d = -Q; d <= Q; ++d) offs.push_back(fl + d);
  }
  std::sort(offs.begin(), offs.end());
  offs.erase(std::unique(offs.begin(), offs.end()), offs.end());
  if (offs.back() - offs.front() >= MN) throw ConfigError("channel spread exceeds the frame length");
  std::map<int, int> idx;
  for (std::size_t a = 0; a < offs.size(); ++a) idx[offs[a]] = static_cast<int>(a);

  CMat taps = CMat::Zero(static_cast<Eigen::Index>(offs.size()), MN);
  std::vector<double> g(2 * Q + 1);
  for (const auto& path : paths) {
    const int fl = static_cast<int>(std::floor(path.l));
    pb.delay_taps(path.l, g.data());
    const double kmn = path.k / static_cast<double>(MN);
    for (int d = -Q; d <= Q; ++d) {
      const int a = idx[fl + d];
      const cplx hg = path.h * g[d + Q];
      for (long j = 0; j < MN; ++j) {
        const long i = wrap(j + fl + d, MN);
        taps(a, j) += hg * unit_phase(kmn * (i - path.l - d));
      }
    }
  }
  return EffectiveChannel(M, N, std::move(offs), std::move(taps));
}

int Constellation::nearest(cplx x) const {
  int best = 0;
  double bd = std::norm(x - points[0]);
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double d = std::norm(x - points[i]);
    if (d < bd) {
      bd = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

Constellation make_constellation(const std::string& name) {
  Constellation c;
  c.name = name;
  if (name == "qam4") {
    const double s = 1.0 / std::sqrt(2.0);
    c.points = {{s, s}, {s, -s}, {-s, s}, {-s, -s}};
    c.bits = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  } else if (name == "bpsk") {
    c.points = {{1.0, 0.0}, {-1.0, 0.0}};
    c.bits = {{0}, {1}};
  } else {
    throw ConfigError("unknown constellation '" + name + "'");
  }
  return c;
}

DetectorSetup data_detector_setup(const SystemParams& p, const Constellation& c, double amplitude,
                                  const CMat& pilot_values) {
  DetectorSetup s;
  s.constellation = c;
  s.amplitude = amplitude;
  s.known_mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(p.M, p.N, false);
  s.known_mask.col(0).setConstant(true);
  s.known_values = CMat::Zero(p.M, p.N);
  if (pilot_values.size() > 0) s.known_values.col(0) = pilot_values.col(0);
  return s;
}

SymbolBeliefs initial_beliefs(const DetectorSetup& setup, int M, int N) {
  SymbolBeliefs b;
  const double E = setup.amplitude * setup.amplitude;
  b.mean = CMat::Zero(M, N);
  b.var = Eigen::MatrixXd::Constant(M, N, E);
  if (setup.known_mask.size() > 0) {
    for (int n = 0; n < N; ++n)
      for (int m = 0; m < M; ++m)
        if (setup.known_mask(m, n)) {
          b.mean(m, n) = setup.known_values(m, n);
          b.var(m, n) = 0.0;
        }
  }
  CMat sdt = b.mean;
  dft::rows_backward(sdt);
  b.s_hat = Eigen::Map<CVec>(sdt.data(), sdt.size());
  b.v_row = b.var.rowwise().mean();
  return b;
}

SweepStats sic_mmse_sweep(SymbolBeliefs& b, const CVec& r, const EffectiveChannel& G, double sigma_z2,
                          const DetectorSetup& setup) {
  SweepStats st;
  if (G.empty()) return st;
  const int M = G.M(), N = G.N();
  const int L = G.L_g();
  double diag = sigma_z2;
  if (sigma_z2 <= 0.0) {
    diag = 1e-12;
    st.ridge_added = true;
  }
  const auto& pts = setup.constellation.points;
  const double amp = setup.amplitude;
  const double prior_var = amp * amp;

  BandCovariance cov(G);
  cov.rebuild(b.v_row, M);

  CMat C(L, L);
  CVec rt(L), u(N), xt(N), xrow(N);
  Eigen::VectorXd e(N);
  std::vector<double> logw(pts.size());

  for (int m = 0; m < M; ++m) {
    const CVec dr = r - G.apply(b.s_hat);
    for (int nd = 0; nd < N; ++nd) {
      const long q = static_cast<long>(nd) * M + m;
      cov.extract(q, diag, C);
      const auto g = G.taps().col(q);
      for (int a = 0; a < L; ++a) rt[a] = dr[G.row(q, a)] + g[a] * b.s_hat[q];
      Eigen::LLT<CMat> llt(C);
      const CVec z = llt.solve(g);
      const double mu = std::max(g.dot(z).real(), 1e-300);
      u[nd] = z.dot(rt) / mu;
      e[nd] = 1.0 / mu - b.v_row[m];
    }
    xt = u;
    dft::transform(std::span<cplx>(xt.data(), N), dft::Sign::forward);
    xt /= std::sqrt(static_cast<double>(N));
    const double s2 = std::max(e.mean(), 1e-15);

    for (int n = 0; n < N; ++n) {
      if (setup.known_mask.size() > 0 && setup.known_mask(m, n)) {
        b.mean(m, n) = setup.known_values(m, n);
        b.var(m, n) = 0.0;
        continue;
      }
      double lmax = -1e300;
      for (std::size_t c = 0; c < pts.size(); ++c) {
        logw[c] = -std::norm(xt[n] - amp * pts[c]) / s2;
        lmax = std::max(lmax, logw[c]);
      }
      double wsum = 0.0, e2 = 0.0;
      cplx mean{};
      for (std::size_t c = 0; c < pts.size(); ++c) {
        const double w = std::exp(logw[c] - lmax);
        wsum += w;
        mean += w * amp * pts[c];
        e2 += w * prior_var * std::norm(pts[c]);
      }
      mean /= wsum;
      const double var = std::max(e2 / wsum - std::norm(mean), 0.0);
      st.max_variance_increase = std::max(st.max_variance_increase, var - prior_var);
      b.mean(m, n) = mean;
      b.var(m, n) = var;
    }

    xrow = b.mean.row(m).transpose();
    dft::transform(std::span<cplx>(xrow.data(), N), dft::Sign::backward);
    xrow /= std::sqrt(static_cast<double>(N));
    for (int nd = 0; nd < N; ++nd) b.s_hat[static_cast<long>(nd) * M + m] = xrow[nd];
    const double v_new = b.var.row(m).mean();
    const double dv = v_new - b.v_row[m];
    if (dv != 0.0)
      for (int nd = 0; nd < N; ++nd) cov.add_column(static_cast<long>(nd) * M + m, dv);
    b.v_row[m] = v_new;
  }
  return st;
}

namespace {

DDFrame hard_decisions(const SymbolBeliefs& b, const DetectorSetup& setup) {
  const int M = static_cast<int>(b.mean.rows()), N = static_cast<int>(b.mean.cols());
  DDFrame out = DDFrame::zeros(M, N, FrameRole::data);
  for (int n = 0; n < N; ++n)
    for (int m = 0; m < M; ++m) {
      if (setup.known_mask.size() > 0 && setup.known_mask(m, n)) {
        out.grid(m, n) = setup.known_values(m, n);
      } else {
        const int c = setup.constellation.nearest(b.mean(m, n) / setup.amplitude);
        out.grid(m, n) = setup.amplitude * setup.constellation.points[c];
      }
    }
  return out;
}

}  // namespace

DetectionResult sic_mmse_detect(const DDFrame& Y, const EffectiveChannel& G, double sigma_z2,
                                const DetectorSetup& setup, int I_DET) {
  if (I_DET < 1) throw ConfigError("I_DET must be at least 1");
  const int M = Y.M(), N = Y.N();
  DetectionResult res;
  res.beliefs = initial_beliefs(setup, M, N);
  CMat rdt = Y.grid;
  dft::rows_backward(rdt);
  const CVec r = Eigen::Map<CVec>(rdt.data(), rdt.size());
  const double tol = 1e-12 * setup.amplitude * setup.amplitude;
  for (int it = 0; it < I_DET; ++it) {
    const CMat before = res.beliefs.mean;
    const SweepStats st = sic_mmse_sweep(res.beliefs, r, G, sigma_z2, setup);
    res.ridge_added = res.ridge_added || st.ridge_added;
    res.max_variance_increase = std::max(res.max_variance_increase, st.max_variance_increase);
    res.sweeps = it + 1;
    if ((res.beliefs.mean - before).cwiseAbs2().maxCoeff() <= tol) break;
  }
  res.detected = hard_decisions(res.beliefs, setup);
  return res;
}

DetectionResult jcedd(const DDFrame& Y, AtomDictionary& atoms, double sigma_z2, const DetectorSetup& setup,
                      const JceddConfig& cfg, const PulseBank& pb) {
  if (cfg.I_JCEDD < 1) throw ConfigError("I_JCEDD must be at least 1");
  const SystemParams& p = atoms.params();
  const int M = p.M, N = p.N;
  DetectionResult res;
  res.beliefs = initial_beliefs(setup, M, N);
  CMat rdt = Y.grid;
  dft::rows_backward(rdt);
  const CVec r = Eigen::Map<CVec>(rdt.data(), rdt.size());

  std::vector<PathEstimate> est;
  for (int it = 0; it < cfg.I_JCEDD; ++it) {
    DDFrame Yc = Y;
    if (!est.empty()) {
      DDFrame Xd(res.beliefs.mean, FrameRole::data);
      for (int m = 0; m < M; ++m)
        for (int n = 0; n < N; ++n)
          if (setup.known_mask(m, n)) Xd.grid(m, n) = 0.0;
      Yc.grid -= dd_response(Xd, to_paths(est), p, pb).grid;
    }
    est = omp_grid_evolution(Yc, atoms, cfg.sensing).paths;
    const EffectiveChannel G = build_effective_channel(to_paths(est), p, pb);
    const SweepStats st = sic_mmse_sweep(res.beliefs, r, G, sigma_z2, setup);
    res.ridge_added = res.ridge_added || st.ridge_added;
    res.max_variance_increase = std::max(res.max_variance_increase, st.max_variance_increase);
  }
  res.paths = est;
  res.sweeps = cfg.I_JCEDD;
  res.detected = hard_decisions(res.beliefs, setup);
  return res;
}

BitErrors count_bit_errors(const DDFrame& detected, const DDFrame& truth, const DetectorSetup& setup) {
  BitErrors be;
  const auto& c = setup.constellation;
  for (int n = 0; n < truth.N(); ++n)
    for (int m = 0; m < truth.M(); ++m) {
      if (setup.known_mask.size() > 0 && setup.known_mask(m, n)) continue;
      const int a = c.nearest(detected.grid(m, n) / setup.amplitude);
      const int b = c.nearest(truth.grid(m, n) / setup.amplitude);
      for (std::size_t i = 0; i < c.bits[a].size(); ++i) be.errors += c.bits[a][i] != c.bits[b][i];
      be.bits += c.bits_per_symbol();
    }
  return be;
}

}  // namespace ddfmcw
