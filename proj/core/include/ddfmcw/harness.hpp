#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "ddfmcw/chirp.hpp"
#include "ddfmcw/detection.hpp"

namespace ddfmcw {

enum class ExperimentKind {
  papr_ccdf,
  psd,
  ambiguity,
  chirp_compression,
  ber_vs_esn0,
  nmse_vs_esn0,
  nrmse_vs_esn0,
  ber_vs_rho,
  nrmse_vs_rho,
  crb,
};

const char* to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);
const std::vector<ExperimentKind>& all_experiment_kinds();

enum class Scale { desk, paper };
Scale scale_from_string(const std::string& s);
const char* to_string(Scale s);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::ber_vs_esn0;
  Scale scale = Scale::desk;
  SystemParams params;
  ChannelProfile channel;
  // Es/N0 in dB for *-vs-esn0 and crb, rho in dB for *-vs-rho and papr-ccdf,
  // unused elsewhere.
  std::vector<double> sweep;
  int trials = 200;
  std::uint64_t seed = 1;
  std::vector<PilotKind> pilots{PilotKind::dd_srn_fmcw, PilotKind::ddip};
  std::string constellation = "qam4";
  double rho_db = -8.0;     // CDPR for the Es/N0 sweeps
  double snr_db = 16.0;     // (Es + Ec) / N0 for the rho sweeps
  int I_DET = 8;
  int I_JCEDD = 8;
  SensingConfig sensing;
  std::filesystem::path out = "out";
  int threads = 0;  // 0: DDFMCW_THREADS, then the hardware count
  bool export_estimates = false;
  bool export_frames = false;
  bool export_waveforms = false;
};

ExperimentConfig default_config(ExperimentKind kind, Scale scale);
// Fields present in `json_text` override `base`.
ExperimentConfig config_from_json(const std::string& json_text, const ExperimentConfig& base);
std::string config_to_json(const ExperimentConfig& c);
void validate(const ExperimentConfig& c);

int resolve_threads(int requested);

// Runs fn(i) for i in [0, n) on `threads` workers.
void parallel_for(long n, int threads, const std::function<void(long)>& fn);

struct RunResult {
  std::vector<std::filesystem::path> files;
  std::filesystem::path manifest;
};

RunResult run_experiment(const ExperimentConfig& c);

}  // namespace ddfmcw
