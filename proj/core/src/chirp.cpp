#include "ddfmcw/chirp.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "ddfmcw/dft.hpp"

namespace ddfmcw {

using std::numbers::pi;

ChirpSequence make_chirp(int M) {
  if (M < 2 || M % 2 != 0) {
    throw ConfigError("chirp length must be even for the ZCA property, got " + std::to_string(M));
  }
  ChirpSequence c;
  c.values.resize(M);
  const std::int64_t two_m = 2 * static_cast<std::int64_t>(M);
  for (int m = 0; m < M; ++m) {
    const std::int64_t r = (static_cast<std::int64_t>(m) * m) % two_m;
    c.values[m] = std::polar(1.0, pi * static_cast<double>(r) / M);
  }
  return c;
}

cplx cyclic_autocorr(const CVec& seq, int zeta) {
  const int M = static_cast<int>(seq.size());
  if (M == 0) return {};
  const int z = ((zeta % M) + M) % M;
  cplx acc{0.0, 0.0};
  for (int m = 0; m < M; ++m) acc += seq[m] * std::conj(seq[(m + z) % M]);
  return acc;
}

double max_cyclic_sidelobe(const CVec& seq) {
  const int M = static_cast<int>(seq.size());
  CVec f = seq;
  dft::transform(std::span<cplx>(f.data(), M), dft::Sign::forward);
  for (int i = 0; i < M; ++i) f[i] = std::norm(f[i]);
  dft::transform(std::span<cplx>(f.data(), M), dft::Sign::backward);
  double worst = 0.0;
  for (int z = 1; z < M; ++z) worst = std::max(worst, std::abs(f[z]) / M);
  return worst;
}

namespace {

bool near_integer(double x) {
  return std::abs(x - std::round(x)) <= 1e-9 * std::max(1.0, std::abs(x));
}

}  // namespace

ZcaCheck check_zca_conditions(const ChirpParams& cp) {
  if (!(cp.T > 0.0) || cp.M < 1) throw ConfigError("chirp check needs positive T and M");
  ZcaCheck out;
  const double rate = cp.epsilon * cp.T * cp.T / cp.M;
  bool a_ok = false;
  std::int64_t a_val = 0;
  if (cp.exact_rate_index) {
    a_ok = true;
    a_val = *cp.exact_rate_index;
  } else if (near_integer(rate)) {
    a_ok = true;
    a_val = static_cast<std::int64_t>(std::llround(rate));
  }
  if (!a_ok) out.failed.push_back(ZcaCondition::a);
  if (!a_ok || std::gcd(a_val, static_cast<std::int64_t>(cp.M)) != 1) {
    out.failed.push_back(ZcaCondition::b);
  }
  bool c_ok;
  if (cp.exact_phase_integral) {
    c_ok = *cp.exact_phase_integral;
  } else {
    c_ok = near_integer(cp.f_c * cp.T + 0.5 * cp.epsilon * cp.T * cp.T);
  }
  if (!c_ok) out.failed.push_back(ZcaCondition::c);
  out.holds = out.failed.empty();
  return out;
}

cplx linear_autocorr(const ChirpParams& cp, int zeta) {
  const double fT = cp.f_c * cp.T;
  const double eT2 = cp.epsilon * cp.T * cp.T;
  const double M = cp.M;
  auto sample = [&](int m) {
    const double cyc = fT * m / M + eT2 * m * static_cast<double>(m) / (2.0 * M * M);
    return std::polar(1.0, 2.0 * pi * (cyc - std::floor(cyc)));
  };
  cplx acc{0.0, 0.0};
  for (int m = 0; m < cp.M; ++m) acc += sample(m) * std::conj(sample(m + zeta));
  return acc;
}

PilotKind pilot_kind_from_string(const std::string& s) {
  if (s == "dd_srn_fmcw" || s == "dd-srn-fmcw" || s == "fmcw") return PilotKind::dd_srn_fmcw;
  if (s == "ddip") return PilotKind::ddip;
  throw ConfigError("unknown pilot kind '" + s + "'");
}

const char* to_string(PilotKind k) {
  return k == PilotKind::dd_srn_fmcw ? "dd_srn_fmcw" : "ddip";
}

Pilot make_pilot(const SystemParams& p, PilotKind kind, double E_c, int m_pilot) {
  if (!(E_c > 0.0)) throw ConfigError("pilot energy must be positive");
  Pilot pl;
  pl.kind = kind;
  pl.E_c = E_c;
  if (kind == PilotKind::dd_srn_fmcw) {
    pl.sequence = make_chirp(p.M).values;
    pl.column = std::sqrt(p.N * E_c) * pl.sequence;
    pl.m_pilot = 0;
  } else {
    pl.m_pilot = m_pilot >= 0 ? m_pilot : p.l_max;
    if (pl.m_pilot >= p.M) throw ConfigError("DDIP position outside the delay axis");
    pl.sequence = CVec::Zero(p.M);
    pl.sequence[pl.m_pilot] = 1.0;
    pl.column = std::sqrt(static_cast<double>(p.M) * p.N * E_c) * pl.sequence;
  }
  return pl;
}

DDFrame pilot_frame(const Pilot& pilot, int N) {
  DDFrame f = DDFrame::zeros(static_cast<int>(pilot.column.size()), N, FrameRole::pilot);
  f.grid.col(0) = pilot.column;
  return f;
}

DDFrame build_pilot_frame(const SystemParams& p, PilotKind kind, double E_c, int m_pilot) {
  return pilot_frame(make_pilot(p, kind, E_c, m_pilot), p.N);
}

}  // namespace ddfmcw
