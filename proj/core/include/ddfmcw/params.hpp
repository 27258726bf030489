#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ddfmcw {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Frame geometry and pulse settings shared by every module.
// Time is expressed in seconds here; internally most code works in units of
// the delay resolution T/M.
struct SystemParams {
  int M = 256;
  int N = 64;
  double T = 66.67e-6;
  double f_c = 5e9;
  double beta = 0.15;
  int Q = 20;
  int O = 8;
  int l_max = 128;

  double delay_resolution() const { return T / M; }
  double doppler_resolution() const { return 1.0 / (N * T); }
  double bandwidth() const { return M / T; }
  int frame_size() const { return M * N; }
};

SystemParams make_params(int M, int N, double T, double f_c, double beta, int Q, int O,
                         int l_max);
void validate(const SystemParams& p);

SystemParams paper_params();
SystemParams desk_params();

// ceil(tau_max * M / T), i.e. the CP length needed for a maximum delay.
int cp_length_for(double tau_max, int M, double T);

std::string to_json(const SystemParams& p);
SystemParams params_from_json(const std::string& text);
// Stable 64-bit FNV-1a hash of the canonical JSON, as 16 hex digits.
std::string params_hash(const SystemParams& p);
std::uint64_t fnv1a64(const std::string& bytes);

enum class FrameRole { pilot, data, composite, received, ddr };
const char* to_string(FrameRole r);

// Delay-Doppler grid, M rows (delay) by N columns (Doppler). Column-major
// storage means grid.data() is already vec(X).
struct DDFrame {
  CMat grid;
  FrameRole role = FrameRole::composite;

  DDFrame() = default;
  DDFrame(CMat g, FrameRole r) : grid(std::move(g)), role(r) {}
  static DDFrame zeros(int M, int N, FrameRole r);

  int M() const { return static_cast<int>(grid.rows()); }
  int N() const { return static_cast<int>(grid.cols()); }
  double energy() const { return grid.squaredNorm(); }
  Eigen::Map<const CVec> vec() const { return {grid.data(), grid.size()}; }
};

void write_frame(std::ostream& os, const DDFrame& f);
DDFrame read_frame(std::istream& is);

// Time-domain powers of the pilot and data waveforms, rho = E_c / E_s.
struct PowerAllocation {
  double E_c = 0.0;
  double E_s = 1.0;
  double rho() const { return E_c / E_s; }
  double total() const { return E_c + E_s; }
};

PowerAllocation split_power(double rho, double total);
double db_to_linear(double db);
double linear_to_db(double x);

}  // namespace ddfmcw
