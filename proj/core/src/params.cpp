#include "ddfmcw/params.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace ddfmcw {

void validate(const SystemParams& p) {
  if (p.M < 2 || p.M % 2 != 0) {
    throw ConfigError("M must be even (>= 2) for the zero cyclic autocorrelation chirp, got " +
                      std::to_string(p.M));
  }
  if (p.N < 1) throw ConfigError("N must be positive");
  if (!(p.T > 0.0) || !std::isfinite(p.T)) throw ConfigError("T must be positive");
  if (!std::isfinite(p.f_c)) throw ConfigError("f_c must be finite");
  if (!(p.beta > 0.0 && p.beta <= 1.0)) throw ConfigError("beta must lie in (0, 1]");
  if (p.Q < 1) throw ConfigError("Q must be at least 1");
  if (p.O < 1) throw ConfigError("O must be at least 1");
  if (p.l_max < 0 || p.l_max >= p.M) {
    throw ConfigError("l_max must satisfy 0 <= l_max < M (got l_max=" + std::to_string(p.l_max) +
                      ", M=" + std::to_string(p.M) + ")");
  }
}

SystemParams make_params(int M, int N, double T, double f_c, double beta, int Q, int O,
                         int l_max) {
  SystemParams p{M, N, T, f_c, beta, Q, O, l_max};
  validate(p);
  return p;
}

SystemParams paper_params() { return make_params(256, 64, 66.67e-6, 5e9, 0.15, 20, 8, 128); }

SystemParams desk_params() { return make_params(64, 16, 66.67e-6, 5e9, 0.15, 20, 8, 33); }

int cp_length_for(double tau_max, int M, double T) {
  if (!(tau_max >= 0.0)) throw ConfigError("tau_max must be non-negative");
  const double bins = tau_max * M / T;
  return static_cast<int>(std::ceil(bins - 1e-9));
}

std::string to_json(const SystemParams& p) {
  nlohmann::json j;
  j["schema"] = 1;
  j["M"] = p.M;
  j["N"] = p.N;
  j["T"] = p.T;
  j["f_c"] = p.f_c;
  j["beta"] = p.beta;
  j["Q"] = p.Q;
  j["O"] = p.O;
  j["l_max"] = p.l_max;
  return j.dump();
}

SystemParams params_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid params JSON: ") + e.what());
  }
  if (j.contains("schema") && j["schema"].get<int>() != 1) {
    throw ConfigError("unsupported params schema");
  }
  SystemParams p;
  try {
    p.M = j.at("M").get<int>();
    p.N = j.at("N").get<int>();
    p.T = j.at("T").get<double>();
    p.f_c = j.at("f_c").get<double>();
    p.beta = j.at("beta").get<double>();
    p.Q = j.at("Q").get<int>();
    p.O = j.at("O").get<int>();
    p.l_max = j.at("l_max").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("params JSON missing field: ") + e.what());
  }
  validate(p);
  return p;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string params_hash(const SystemParams& p) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_json(p))));
  return buf;
}

const char* to_string(FrameRole r) {
  switch (r) {
    case FrameRole::pilot: return "pilot";
    case FrameRole::data: return "data";
    case FrameRole::composite: return "composite";
    case FrameRole::received: return "received";
    case FrameRole::ddr: return "ddr";
  }
  return "unknown";
}

DDFrame DDFrame::zeros(int M, int N, FrameRole r) { return DDFrame(CMat::Zero(M, N), r); }

namespace {
constexpr char kFrameMagic[4] = {'D', 'D', 'F', '1'};
}

void write_frame(std::ostream& os, const DDFrame& f) {
  os.write(kFrameMagic, 4);
  const std::int32_t hdr[3] = {static_cast<std::int32_t>(f.role), f.M(), f.N()};
  os.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
  os.write(reinterpret_cast<const char*>(f.grid.data()),
           static_cast<std::streamsize>(f.grid.size() * sizeof(cplx)));
  if (!os) throw std::runtime_error("failed to write DD frame");
}

DDFrame read_frame(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kFrameMagic, 4) != 0) throw std::runtime_error("not a DD frame");
  std::int32_t hdr[3];
  is.read(reinterpret_cast<char*>(hdr), sizeof hdr);
  if (!is || hdr[0] < 0 || hdr[0] > 4 || hdr[1] < 1 || hdr[2] < 1) {
    throw std::runtime_error("corrupt DD frame header");
  }
  DDFrame f(CMat(hdr[1], hdr[2]), static_cast<FrameRole>(hdr[0]));
  is.read(reinterpret_cast<char*>(f.grid.data()),
          static_cast<std::streamsize>(f.grid.size() * sizeof(cplx)));
  if (!is) throw std::runtime_error("truncated DD frame");
  return f;
}

PowerAllocation split_power(double rho, double total) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ConfigError("rho must be positive");
  if (!(total > 0.0) || !std::isfinite(total)) throw ConfigError("total power must be positive");
  PowerAllocation a;
  a.E_s = total / (1.0 + rho);
  a.E_c = total * rho / (1.0 + rho);
  return a;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double x) { return 10.0 * std::log10(x); }

}  // namespace ddfmcw
