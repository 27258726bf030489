#include "ddfmcw/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace ddfmcw {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream os(path, mode);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

void write_meta(std::ostream& os, const CsvMeta& m) {
  os << "# schema=1; quantity=" << m.quantity << "; units=" << m.units << "; params_hash=" << m.params_hash;
  for (const auto& [k, v] : m.extra) os << "; " << k << "=" << v;
  os << "\n";
}

void check_written(std::ofstream& os, const fs::path& path) {
  os.flush();
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

void write_curve_csv(const fs::path& path, const CsvMeta& meta, const std::vector<CurvePoint>& rows) {
  auto os = open_out(path);
  write_meta(os, meta);
  os << "x,metric,mean,stderr,trials,params_hash\n";
  for (const auto& r : rows) {
    os << format_double(r.x) << ',' << r.metric << ',' << format_double(r.mean) << ','
       << format_double(r.stderr_) << ',' << r.trials << ',' << r.params_hash << '\n';
  }
  check_written(os, path);
}

std::vector<CurvePoint> read_curve_csv(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  std::vector<CurvePoint> out;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "x,metric,mean,stderr,trials,params_hash")
        throw std::runtime_error("unexpected curve header in " + path.string());
      header = true;
      continue;
    }
    std::stringstream ss(line);
    std::string cell[6];
    for (auto& c : cell) std::getline(ss, c, ',');
    out.push_back({std::stod(cell[0]), cell[1], std::stod(cell[2]), std::stod(cell[3]), std::stol(cell[4]), cell[5]});
  }
  return out;
}

void write_table_csv(const fs::path& path, const CsvMeta& meta, const std::vector<std::string>& columns,
                     const std::vector<std::vector<std::string>>& rows) {
  auto os = open_out(path);
  write_meta(os, meta);
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << '\n';
  for (const auto& r : rows) {
    if (r.size() != columns.size()) throw std::invalid_argument("table row width differs from the header");
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  }
  check_written(os, path);
}

void write_estimates_csv(const fs::path& path, const CsvMeta& meta, const std::vector<EstimateRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    for (std::size_t p = 0; p < r.paths.size(); ++p) {
      const auto& e = r.paths[p];
      cells.push_back({std::to_string(r.trial), std::to_string(p), format_double(e.h_hat.real()),
                       format_double(e.h_hat.imag()), format_double(e.l_hat), format_double(e.k_hat)});
    }
  }
  write_table_csv(path, meta, {"trial_id", "p", "re_h", "im_h", "l", "k"}, cells);
}

void write_frame_csv(const fs::path& path, const CsvMeta& meta, const DDFrame& frame, const DetectorSetup& setup) {
  std::vector<std::vector<std::string>> cells;
  const auto& c = setup.constellation;
  for (int n = 0; n < frame.N(); ++n) {
    for (int m = 0; m < frame.M(); ++m) {
      const cplx v = frame.grid(m, n);
      std::string idx, bits;
      const bool known = setup.known_mask.size() > 0 && setup.known_mask(m, n);
      if (!known && !c.points.empty()) {
        const int s = c.nearest(v / setup.amplitude);
        idx = std::to_string(s);
        for (int b : c.bits[s]) bits += static_cast<char>('0' + b);
      }
      cells.push_back({std::to_string(m), std::to_string(n), format_double(v.real()), format_double(v.imag()), idx,
                       bits});
    }
  }
  write_table_csv(path, meta, {"m", "n", "re", "im", "symbol", "bits"}, cells);
}

void write_waveform(const fs::path& path, const Waveform& w, const SystemParams& p) {
  static_assert(std::endian::native == std::endian::little, "waveform export assumes a little-endian host");
  {
    auto os = open_out(path, std::ios::out | std::ios::binary);
    for (const cplx& s : w.samples) {
      const float v[2] = {static_cast<float>(s.real()), static_cast<float>(s.imag())};
      os.write(reinterpret_cast<const char*>(v), sizeof(v));
    }
    check_written(os, path);
  }
  nlohmann::ordered_json j;
  j["format"] = "complex64le";
  j["sample_rate_hz"] = w.rate_hz(p);
  j["num_samples"] = w.samples.size();
  j["oversampling"] = w.O;
  j["first_index"] = w.first_index;
  j["start_offset_s"] = w.start_offset_s(p);
  j["cp_len"] = w.cp_len;
  j["params_hash"] = params_hash(p);
  fs::path side = path;
  side += ".json";
  auto os = open_out(side);
  os << j.dump(2) << '\n';
  check_written(os, side);
}

Waveform read_waveform(const fs::path& path) {
  fs::path side = path;
  side += ".json";
  std::ifstream js(side);
  if (!js) throw std::runtime_error("cannot read " + side.string());
  const auto j = nlohmann::json::parse(js);
  Waveform w;
  w.O = j.at("oversampling").get<int>();
  w.first_index = j.at("first_index").get<long>();
  w.cp_len = j.at("cp_len").get<int>();
  const auto n = j.at("num_samples").get<std::size_t>();
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  w.samples.resize(n);
  for (auto& s : w.samples) {
    float v[2];
    is.read(reinterpret_cast<char*>(v), sizeof(v));
    s = {v[0], v[1]};
  }
  if (!is) throw std::runtime_error("truncated waveform " + path.string());
  return w;
}

MeanStderr mean_stderr(const std::vector<double>& v) {
  MeanStderr r;
  const std::size_t n = v.size();
  if (n == 0) return r;
  double s = 0.0;
  for (double x : v) s += x;
  r.mean = s / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    r.stderr_ = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  }
  return r;
}

}  // namespace ddfmcw
