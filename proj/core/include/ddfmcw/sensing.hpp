#pragma once

#include <vector>

#include "ddfmcw/channel.hpp"

namespace ddfmcw {

struct PathEstimate {
  cplx h_hat{0.0, 0.0};
  double l_hat = 0.0;
  double k_hat = 0.0;
  int refinement_level = 0;
};

struct SensingConfig {
  int P_max = 4;
  int L = 10;
  int I_DAS = 4;
  int neighborhood = 3;
};

struct SensingResult {
  std::vector<PathEstimate> paths;
  bool rank_deficient = false;
  // residual energy after each accepted path (OMP) or after each outer
  // iteration (DAS)
  std::vector<double> residual_energy;
  // DAS only: estimates after every outer iteration
  std::vector<std::vector<PathEstimate>> history;
};

std::vector<PathParams> to_paths(const std::vector<PathEstimate>& est);

// D[md, n] = sum_m conj(seq[(m - md) mod M]) Y[m, n]
DDFrame dd_chirp_compress(const DDFrame& Y, const CVec& seq);

SensingResult omp_grid_evolution(const DDFrame& Y, AtomDictionary& atoms, const SensingConfig& cfg);
SensingResult das(const DDFrame& Y, AtomDictionary& atoms, const DDFrame& X_d, const SensingConfig& cfg,
                  const PulseBank& pb);

void validate(const SensingConfig& cfg);

}  // namespace ddfmcw
