#include "ddfmcw/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "experiments.hpp"

namespace ddfmcw {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct KindName {
  ExperimentKind kind;
  const char* name;
};

constexpr KindName kKinds[] = {
    {ExperimentKind::papr_ccdf, "papr-ccdf"},
    {ExperimentKind::psd, "psd"},
    {ExperimentKind::ambiguity, "ambiguity"},
    {ExperimentKind::chirp_compression, "chirp-compression"},
    {ExperimentKind::ber_vs_esn0, "ber-vs-esn0"},
    {ExperimentKind::nmse_vs_esn0, "nmse-vs-esn0"},
    {ExperimentKind::nrmse_vs_esn0, "nrmse-vs-esn0"},
    {ExperimentKind::ber_vs_rho, "ber-vs-rho"},
    {ExperimentKind::nrmse_vs_rho, "nrmse-vs-rho"},
    {ExperimentKind::crb, "crb"},
};

}  // namespace

const char* to_string(ExperimentKind k) {
  for (const auto& e : kKinds)
    if (e.kind == k) return e.name;
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (const auto& e : kKinds)
    if (s == e.name) return e.kind;
  throw ConfigError("unknown experiment kind '" + s + "'");
}

const std::vector<ExperimentKind>& all_experiment_kinds() {
  static const std::vector<ExperimentKind> v = [] {
    std::vector<ExperimentKind> out;
    for (const auto& e : kKinds) out.push_back(e.kind);
    return out;
  }();
  return v;
}

Scale scale_from_string(const std::string& s) {
  if (s == "desk") return Scale::desk;
  if (s == "paper") return Scale::paper;
  throw ConfigError("unknown scale '" + s + "' (expected desk or paper)");
}

const char* to_string(Scale s) { return s == Scale::desk ? "desk" : "paper"; }

ExperimentConfig default_config(ExperimentKind kind, Scale scale) {
  ExperimentConfig c;
  c.kind = kind;
  c.scale = scale;
  const bool desk = scale == Scale::desk;
  c.params = desk ? desk_params() : paper_params();
  c.channel = ChannelProfile::from_physical(kTauMax, kNuMax, c.params, 4);
  if (!desk) c.params.l_max = cp_length_for(kTauMax, c.params.M, c.params.T);
  c.trials = desk ? 200 : 2000;
  switch (kind) {
    case ExperimentKind::papr_ccdf:
      c.sweep = {-10.0, -5.0, 0.0};
      c.trials = 10000;
      break;
    case ExperimentKind::psd:
      c.params = make_params(32, desk ? 8 : 4, c.params.T, c.params.f_c, c.params.beta, c.params.Q, c.params.O, 16);
      c.sweep = {0.0};
      break;
    case ExperimentKind::ambiguity:
      c.params = make_params(64, 64, c.params.T, c.params.f_c, c.params.beta, c.params.Q, c.params.O, 32);
      c.sweep = {0.0};
      c.trials = 1;
      break;
    case ExperimentKind::chirp_compression:
      c.params = make_params(64, 1, c.params.T, c.params.f_c, c.params.beta, c.params.Q, c.params.O, 0);
      c.sweep = {0.0};
      c.trials = 1;
      break;
    case ExperimentKind::ber_vs_esn0:
    case ExperimentKind::nmse_vs_esn0:
      c.sweep = {8.0, 12.0, 16.0, 20.0};
      break;
    case ExperimentKind::nrmse_vs_esn0:
      c.sweep = {0.0, 5.0, 10.0, 15.0, 20.0};
      break;
    case ExperimentKind::ber_vs_rho:
    case ExperimentKind::nrmse_vs_rho:
      c.sweep = {-20.0, -16.0, -12.0, -8.0, -4.0, 0.0};
      break;
    case ExperimentKind::crb:
      c.sweep = {0.0, 5.0, 10.0, 15.0, 20.0};
      c.trials = 1;
      break;
  }
  return c;
}

namespace {

template <class T>
void take(const ordered_json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text, const ExperimentConfig& base) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid config JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config JSON must be an object");
  ExperimentConfig c = base;
  try {
    if (j.contains("kind")) {
      const ExperimentKind k = experiment_kind_from_string(j["kind"].get<std::string>());
      if (k != c.kind) {
        const ExperimentConfig d = default_config(k, c.scale);
        c = d;
      }
    }
    if (j.contains("params")) {
      auto merged = ordered_json::parse(to_json(c.params));
      for (auto& [k, v] : j["params"].items()) merged[k] = v;
      c.params = params_from_json(merged.dump());
    }
    if (j.contains("channel")) {
      const auto& ch = j["channel"];
      take(ch, "l_max_chan", c.channel.l_max_chan);
      take(ch, "k_max", c.channel.k_max);
      take(ch, "P", c.channel.P);
    }
    take(j, "sweep", c.sweep);
    take(j, "trials", c.trials);
    take(j, "seed", c.seed);
    if (j.contains("pilots")) {
      c.pilots.clear();
      for (const auto& s : j["pilots"]) c.pilots.push_back(pilot_kind_from_string(s.get<std::string>()));
    }
    take(j, "constellation", c.constellation);
    take(j, "rho_db", c.rho_db);
    take(j, "snr_db", c.snr_db);
    take(j, "I_DET", c.I_DET);
    take(j, "I_JCEDD", c.I_JCEDD);
    if (j.contains("sensing")) {
      const auto& s = j["sensing"];
      take(s, "P_max", c.sensing.P_max);
      take(s, "L", c.sensing.L);
      take(s, "I_DAS", c.sensing.I_DAS);
      take(s, "neighborhood", c.sensing.neighborhood);
    }
    if (j.contains("out")) c.out = j["out"].get<std::string>();
    take(j, "threads", c.threads);
    take(j, "export_estimates", c.export_estimates);
    take(j, "export_frames", c.export_frames);
    take(j, "export_waveforms", c.export_waveforms);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config JSON: ") + e.what());
  }
  validate(c);
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["kind"] = to_string(c.kind);
  j["scale"] = to_string(c.scale);
  j["params"] = ordered_json::parse(to_json(c.params));
  j["channel"] = {{"l_max_chan", c.channel.l_max_chan}, {"k_max", c.channel.k_max}, {"P", c.channel.P}};
  j["sweep"] = c.sweep;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["pilots"] = ordered_json::array();
  for (auto k : c.pilots) j["pilots"].push_back(to_string(k));
  j["constellation"] = c.constellation;
  j["rho_db"] = c.rho_db;
  j["snr_db"] = c.snr_db;
  j["I_DET"] = c.I_DET;
  j["I_JCEDD"] = c.I_JCEDD;
  j["sensing"] = {{"P_max", c.sensing.P_max},
                  {"L", c.sensing.L},
                  {"I_DAS", c.sensing.I_DAS},
                  {"neighborhood", c.sensing.neighborhood}};
  j["out"] = c.out.string();
  j["export_estimates"] = c.export_estimates;
  j["export_frames"] = c.export_frames;
  j["export_waveforms"] = c.export_waveforms;
  return j.dump(2);
}

void validate(const ExperimentConfig& c) {
  validate(c.params);
  validate(c.sensing);
  if (c.trials < 1) throw ConfigError("trials must be at least 1");
  if (c.sweep.empty()) throw ConfigError("sweep must not be empty");
  if (c.pilots.empty()) throw ConfigError("at least one pilot kind is required");
  if (c.I_DET < 1 || c.I_JCEDD < 1) throw ConfigError("iteration counts must be at least 1");
  if (c.channel.P < 1) throw ConfigError("channel path count must be at least 1");
  if (c.channel.l_max_chan < 0.0 || c.channel.k_max < 0.0) throw ConfigError("channel spreads must be non-negative");
  if (c.threads < 0) throw ConfigError("threads must be non-negative");
  make_constellation(c.constellation);
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DDFMCW_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
    throw ConfigError("DDFMCW_THREADS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(long n, int threads, const std::function<void(long)>& fn) {
  if (n <= 0) return;
  const int T = static_cast<int>(std::min<long>(std::max(1, threads), n));
  if (T == 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&] {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lk(err_mu);
        if (!err) err = std::current_exception();
        next.store(n);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(T);
  for (int t = 0; t < T; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

RunResult run_experiment(const ExperimentConfig& c) {
  validate(c);
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec || !fs::is_directory(c.out)) throw std::runtime_error("cannot create output directory " + c.out.string());

  const int threads = resolve_threads(c.threads);
  detail::RunContext ctx{c, threads, params_hash(c.params), {}, {}};
  switch (c.kind) {
    case ExperimentKind::papr_ccdf: detail::run_papr_ccdf(ctx); break;
    case ExperimentKind::psd: detail::run_psd(ctx); break;
    case ExperimentKind::ambiguity: detail::run_ambiguity(ctx); break;
    case ExperimentKind::chirp_compression: detail::run_chirp_compression(ctx); break;
    case ExperimentKind::ber_vs_esn0: detail::run_ber_vs_esn0(ctx); break;
    case ExperimentKind::nmse_vs_esn0: detail::run_nmse_vs_esn0(ctx); break;
    case ExperimentKind::nrmse_vs_esn0: detail::run_nrmse_vs_esn0(ctx); break;
    case ExperimentKind::ber_vs_rho: detail::run_ber_vs_rho(ctx); break;
    case ExperimentKind::nrmse_vs_rho: detail::run_nrmse_vs_rho(ctx); break;
    case ExperimentKind::crb: detail::run_crb(ctx); break;
  }

  ordered_json m;
  m["schema"] = 1;
  m["tool"] = "ddfmcw";
  m["version"] = "0.1.0";
  m["kind"] = to_string(c.kind);
  m["params_hash"] = ctx.params_hash;
  m["config"] = ordered_json::parse(config_to_json(c));
  m["conventions"] = {
      {"time_unit", "T/M"},
      {"frequency_unit", "M/T"},
      {"power", "E_c and E_s are time-domain powers; data occupies Doppler columns 1..N-1"},
      {"esn0", "E_s / N0 with N0 = sigma_z^2"},
      {"nrmse_normalizers", {{"delay", c.channel.l_max_chan}, {"doppler", c.channel.k_max}}},
      {"association", "greedy nearest pair in (l / l_max_chan, k / k_max); unmatched truths count as 1"},
      {"random_streams", "per trial from (seed, kind, 0, trial); sweep points reuse a trial's channel, data and unit noise"},
  };
  for (const auto& [k, v] : ctx.notes) m["results"][k] = v;
  m["files"] = ordered_json::array();
  for (const auto& f : ctx.files) m["files"].push_back(f.filename().string());

  RunResult r;
  r.files = ctx.files;
  r.manifest = c.out / "manifest.json";
  std::ofstream os(r.manifest);
  if (!os) throw std::runtime_error("cannot write " + r.manifest.string());
  os << m.dump(2) << '\n';
  if (!os) throw std::runtime_error("failed writing " + r.manifest.string());
  return r;
}

}  // namespace ddfmcw
