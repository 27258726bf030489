#pragma once

#include <vector>

#include "ddfmcw/sensing.hpp"

namespace ddfmcw {

// ||Y_est - Y_true||^2 / ||Y_true||^2 for a unit-energy impulse frame at
// (m_pilot, 0) passed through the estimated and the true channel.
double nmse_vs_virtual_ddip(const std::vector<PathEstimate>& est, const std::vector<PathParams>& truth,
                            const SystemParams& p, const PulseBank& pb, int m_pilot = -1);

enum class Axis { delay, doppler };

// Scales of the (l, k) plane used both for association distance and NRMSE.
struct AxisScales {
  double l_span = 1.0;
  double k_span = 1.0;
};

// Greedy association: repeatedly pair the closest unmatched estimate and
// truth in normalized (l, k) distance. Entry i refers to truth i; -1 when
// the truth is left unmatched.
std::vector<int> associate(const std::vector<PathEstimate>& est, const std::vector<PathParams>& truth,
                           const AxisScales& s);

// Per-truth squared errors normalized by the axis span; unmatched truths
// contribute 1.
struct MatchedErrors {
  std::vector<double> delay2;
  std::vector<double> doppler2;
};
MatchedErrors matched_errors(const std::vector<PathEstimate>& est, const std::vector<PathParams>& truth,
                             const AxisScales& s);

double nrmse(const std::vector<PathEstimate>& est, const std::vector<PathParams>& truth, Axis axis,
             const AxisScales& s);

}  // namespace ddfmcw
