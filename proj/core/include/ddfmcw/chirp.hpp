#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ddfmcw/params.hpp"

namespace ddfmcw {

struct ChirpSequence {
  CVec values;
  int M() const { return static_cast<int>(values.size()); }
};

// Continuous chirp exp(j 2 pi (f_c + eps t / 2) t) on [0, T), sampled M times.
struct ChirpParams {
  double f_c = 0.0;
  double epsilon = 0.0;
  double T = 1.0;
  int M = 2;
  // Set these when eps T^2 / M and f_c T + eps T^2 / 2 are known to be
  // integers exactly; floating point products like f_c T can be huge.
  std::optional<std::int64_t> exact_rate_index;
  std::optional<bool> exact_phase_integral;
};

enum class ZcaCondition { a, b, c };

struct ZcaCheck {
  bool holds = false;
  std::vector<ZcaCondition> failed;
};

ChirpSequence make_chirp(int M);
cplx cyclic_autocorr(const CVec& seq, int zeta);
// max over zeta = 1..M-1 of |cyclic_autocorr|, computed through an FFT.
double max_cyclic_sidelobe(const CVec& seq);
ZcaCheck check_zca_conditions(const ChirpParams& cp);
// Non-cyclic autocorrelation of the sampled continuous chirp.
cplx linear_autocorr(const ChirpParams& cp, int zeta);

enum class PilotKind { dd_srn_fmcw, ddip };
PilotKind pilot_kind_from_string(const std::string& s);
const char* to_string(PilotKind k);

// Pilot description shared by sensing: the unit reference sequence used for
// delay compression, and the scaled column 0 of the pilot frame.
struct Pilot {
  PilotKind kind = PilotKind::dd_srn_fmcw;
  CVec sequence;
  CVec column;
  int m_pilot = 0;
  double E_c = 0.0;
};

DDFrame build_pilot_frame(const SystemParams& p, PilotKind kind, double E_c, int m_pilot = -1);
Pilot make_pilot(const SystemParams& p, PilotKind kind, double E_c, int m_pilot = -1);
DDFrame pilot_frame(const Pilot& pilot, int N);

}  // namespace ddfmcw
