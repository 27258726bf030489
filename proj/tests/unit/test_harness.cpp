#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ddfmcw/harness.hpp"
#include "ddfmcw/io.hpp"

using namespace ddfmcw;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& f) {
  std::ifstream in(f, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig tiny(ExperimentKind kind, const std::string& out) {
  ExperimentConfig c = default_config(kind, Scale::desk);
  c.params = make_params(16, 8, 66.67e-6, 5e9, 0.15, 20, 8, 8);
  c.channel = {6.0, 2.0, 2};
  c.trials = 6;
  c.sweep = {10.0, 20.0};
  c.sensing.L = 4;
  c.out = fs::temp_directory_path() / "ddfmcw_unit" / out;
  fs::remove_all(c.out);
  return c;
}

}  // namespace

TEST(Harness, KindNamesRoundTrip) {
  for (ExperimentKind k : all_experiment_kinds()) EXPECT_EQ(experiment_kind_from_string(to_string(k)), k);
  EXPECT_THROW(experiment_kind_from_string("nope"), ConfigError);
  EXPECT_EQ(scale_from_string("paper"), Scale::paper);
  EXPECT_EQ(all_experiment_kinds().size(), 10u);
}

TEST(Harness, ConfigJsonRoundTripAndOverrides) {
  for (ExperimentKind k : all_experiment_kinds())
    for (Scale s : {Scale::desk, Scale::paper}) {
      const ExperimentConfig c = default_config(k, s);
      EXPECT_NO_THROW(validate(c));
      const ExperimentConfig r = config_from_json(config_to_json(c), default_config(k, s));
      EXPECT_EQ(config_to_json(r), config_to_json(c));
    }
  const ExperimentConfig base = default_config(ExperimentKind::ber_vs_rho, Scale::desk);
  const ExperimentConfig o =
      config_from_json(R"({"trials": 7, "params": {"M": 128}, "sensing": {"P_max": 3}, "pilots": ["ddip"]})", base);
  EXPECT_EQ(o.trials, 7);
  EXPECT_EQ(o.params.M, 128);
  EXPECT_EQ(o.params.N, base.params.N);
  EXPECT_EQ(o.sensing.P_max, 3);
  ASSERT_EQ(o.pilots.size(), 1u);
  EXPECT_EQ(o.pilots[0], PilotKind::ddip);
}

TEST(Harness, InvalidConfigsRejected) {
  const ExperimentConfig base = default_config(ExperimentKind::crb, Scale::desk);
  EXPECT_THROW(config_from_json("[1,2]", base), ConfigError);
  EXPECT_THROW(config_from_json("{", base), ConfigError);
  EXPECT_THROW(config_from_json(R"({"trials": 0})", base), ConfigError);
  EXPECT_THROW(config_from_json(R"({"trials": "many"})", base), ConfigError);
  EXPECT_THROW(config_from_json(R"({"params": {"M": 15}})", base), ConfigError);
  EXPECT_THROW(config_from_json(R"({"constellation": "qam1024"})", base), ConfigError);
  EXPECT_THROW(config_from_json(R"({"sweep": []})", base), ConfigError);
  EXPECT_THROW(config_from_json(R"({"pilots": ["zc"]})", base), ConfigError);
}

TEST(Harness, ThreadResolution) {
  EXPECT_EQ(resolve_threads(3), 3);
  ::setenv("DDFMCW_THREADS", "5", 1);
  EXPECT_EQ(resolve_threads(0), 5);
  ::setenv("DDFMCW_THREADS", "x", 1);
  EXPECT_THROW(resolve_threads(0), ConfigError);
  ::unsetenv("DDFMCW_THREADS");
  EXPECT_GE(resolve_threads(0), 1);
}

TEST(Harness, ParallelForVisitsEachIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(1000, 4, [&](long i) { hits[i]++; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(10, 3, [](long i) { if (i == 7) throw std::runtime_error("boom"); }), std::runtime_error);
}

TEST(Harness, OutputsIndependentOfThreadCount) {
  ExperimentConfig a = tiny(ExperimentKind::nrmse_vs_esn0, "t1");
  a.threads = 1;
  ExperimentConfig b = tiny(ExperimentKind::nrmse_vs_esn0, "t4");
  b.threads = 4;
  const RunResult ra = run_experiment(a);
  const RunResult rb = run_experiment(b);
  ASSERT_EQ(ra.files.size(), rb.files.size());
  ASSERT_FALSE(ra.files.empty());
  for (std::size_t i = 0; i < ra.files.size(); ++i) {
    EXPECT_EQ(ra.files[i].filename(), rb.files[i].filename());
    EXPECT_EQ(slurp(ra.files[i]), slurp(rb.files[i])) << ra.files[i];
  }
  EXPECT_TRUE(fs::exists(ra.manifest));
}

TEST(Harness, StderrShrinksWithTrials) {
  ExperimentConfig a = tiny(ExperimentKind::nmse_vs_esn0, "s1");
  a.trials = 4;
  ExperimentConfig b = tiny(ExperimentKind::nmse_vs_esn0, "s2");
  b.trials = 24;
  run_experiment(a);
  run_experiment(b);
  double sa = 0.0, sb = 0.0;
  for (const auto& r : read_curve_csv(a.out / "nmse.csv")) sa += r.stderr_;
  for (const auto& r : read_curve_csv(b.out / "nmse.csv")) sb += r.stderr_;
  EXPECT_GT(sa, 0.0);
  EXPECT_LT(sb, sa);
}

#ifdef DDFMCW_CLI_PATH
namespace {

int cli(const std::string& args) {
  const std::string cmd = std::string(DDFMCW_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST(Cli, ExitCodes) {
  const fs::path out = fs::temp_directory_path() / "ddfmcw_unit" / "cli";
  fs::remove_all(out);
  EXPECT_EQ(cli("chirp-compression --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
  EXPECT_TRUE(fs::exists(out / "chirp_compression.csv"));
  EXPECT_EQ(cli("no-such-experiment"), 2);
  EXPECT_EQ(cli("psd --trials 0"), 2);
  EXPECT_EQ(cli("psd --config /nonexistent/file.json"), 2);
  const fs::path cfg = out / "bad.json";
  std::ofstream(cfg) << R"({"kind": "psd", "params": {"M": 7}})";
  EXPECT_EQ(cli("psd --config " + cfg.string()), 2);
  std::ofstream(cfg) << R"({"kind": "ambiguity"})";
  EXPECT_EQ(cli("psd --config " + cfg.string()), 2);
  EXPECT_EQ(cli("crb --print-config"), 0);
}
#endif
