#pragma once

#include <string>
#include <vector>

#include "ddfmcw/channel.hpp"
#include "ddfmcw/sensing.hpp"

namespace ddfmcw {

// Symbol-rate channel as a banded cyclic operator: G(i, j) is nonzero only
// when i - j (mod MN) is one of `offsets`, with value taps(o, j).
class EffectiveChannel {
 public:
  EffectiveChannel() = default;
  EffectiveChannel(int M, int N, std::vector<int> offsets, CMat taps);

  int M() const { return M_; }
  int N() const { return N_; }
  long MN() const { return static_cast<long>(M_) * N_; }
  int L_g() const { return static_cast<int>(offsets_.size()); }
  int span() const { return offsets_.empty() ? 0 : offsets_.back() - offsets_.front(); }
  bool empty() const { return offsets_.empty(); }
  const std::vector<int>& offsets() const { return offsets_; }
  const CMat& taps() const { return taps_; }

  CVec apply(const CVec& s) const;
  long row(long q, int o_idx) const;
  // Column q of G restricted to its support rows.
  CVec g(long q) const { return taps_.col(q); }

  struct SubChannel {
    std::vector<long> rows;
    std::vector<long> cols;
    CMat G;
  };
  // Dense G restricted to the support rows of column q and every column
  // that touches them.
  SubChannel sub_channel(long q) const;
  CMat dense() const;

 private:
  int M_ = 0;
  int N_ = 0;
  std::vector<int> offsets_;
  CMat taps_;
};

EffectiveChannel build_effective_channel(const std::vector<PathParams>& paths, const SystemParams& p,
                                         const PulseBank& pb);

struct Constellation {
  std::string name;
  std::vector<cplx> points;          // unit mean energy
  std::vector<std::vector<int>> bits;  // Gray labels
  int bits_per_symbol() const { return bits.empty() ? 0 : static_cast<int>(bits.front().size()); }
  int nearest(cplx x) const;
};

Constellation make_constellation(const std::string& name);

struct SymbolBeliefs {
  CMat mean;              // M x N posterior means
  Eigen::MatrixXd var;    // M x N posterior variances
  CVec s_hat;             // prior mean per time sample
  Eigen::VectorXd v_row;  // prior variance per delay row
};

struct DetectorSetup {
  Constellation constellation;
  double amplitude = 1.0;  // data symbols are amplitude * constellation point
  // Positions whose symbols are known (pilot or unused), with their values.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> known_mask;
  CMat known_values;
};

DetectorSetup data_detector_setup(const SystemParams& p, const Constellation& c, double amplitude,
                                  const CMat& pilot_values);

SymbolBeliefs initial_beliefs(const DetectorSetup& setup, int M, int N);

struct SweepStats {
  bool ridge_added = false;
  double max_variance_increase = 0.0;  // max over symbols of posterior var - prior var
};

// One pass of soft SIC-MMSE over all delay rows.
SweepStats sic_mmse_sweep(SymbolBeliefs& b, const CVec& r, const EffectiveChannel& G, double sigma_z2,
                          const DetectorSetup& setup);

struct DetectionResult {
  DDFrame detected;  // hard decisions, known positions copied through
  SymbolBeliefs beliefs;
  bool ridge_added = false;
  double max_variance_increase = 0.0;
  int sweeps = 0;
  std::vector<PathEstimate> paths;  // JCEDD only
};

DetectionResult sic_mmse_detect(const DDFrame& Y, const EffectiveChannel& G, double sigma_z2,
                                const DetectorSetup& setup, int I_DET = 8);

struct JceddConfig {
  int I_JCEDD = 8;
  SensingConfig sensing;
};

DetectionResult jcedd(const DDFrame& Y, AtomDictionary& atoms, double sigma_z2, const DetectorSetup& setup,
                      const JceddConfig& cfg, const PulseBank& pb);

// Hard decisions of every unknown position, and bit error count against the truth.
struct BitErrors {
  long errors = 0;
  long bits = 0;
};
BitErrors count_bit_errors(const DDFrame& detected, const DDFrame& truth, const DetectorSetup& setup);

}  // namespace ddfmcw
