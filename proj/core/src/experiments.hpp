#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ddfmcw/harness.hpp"
#include "ddfmcw/io.hpp"

namespace ddfmcw::detail {

struct RunContext {
  const ExperimentConfig& cfg;
  int threads;
  std::string params_hash;
  std::vector<std::filesystem::path> files;
  std::vector<std::pair<std::string, double>> notes;

  void curve(const std::string& name, const std::string& quantity, const std::string& units,
             const std::vector<CurvePoint>& rows, std::vector<std::pair<std::string, std::string>> extra = {});
  CsvMeta meta(const std::string& quantity, const std::string& units) const;
  std::filesystem::path path(const std::string& file) const { return cfg.out / file; }
};

void run_papr_ccdf(RunContext& ctx);
void run_psd(RunContext& ctx);
void run_ambiguity(RunContext& ctx);
void run_chirp_compression(RunContext& ctx);
void run_ber_vs_esn0(RunContext& ctx);
void run_nmse_vs_esn0(RunContext& ctx);
void run_nrmse_vs_esn0(RunContext& ctx);
void run_ber_vs_rho(RunContext& ctx);
void run_nrmse_vs_rho(RunContext& ctx);
void run_crb(RunContext& ctx);

}  // namespace ddfmcw::detail
