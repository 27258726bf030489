#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ddfmcw/detection.hpp"
#include "ddfmcw/modem.hpp"

namespace ddfmcw {

struct CurvePoint {
  double x = 0.0;
  std::string metric;
  double mean = 0.0;
  double stderr_ = 0.0;
  long trials = 0;
  std::string params_hash;
};

// First line of every CSV: "# key=value; key=value".
struct CsvMeta {
  std::string quantity;
  std::string units;
  std::string params_hash;
  std::vector<std::pair<std::string, std::string>> extra;
};

// %.17g
std::string format_double(double v);

void write_curve_csv(const std::filesystem::path& path, const CsvMeta& meta, const std::vector<CurvePoint>& rows);
std::vector<CurvePoint> read_curve_csv(const std::filesystem::path& path);

void write_table_csv(const std::filesystem::path& path, const CsvMeta& meta, const std::vector<std::string>& columns,
                     const std::vector<std::vector<std::string>>& rows);

// trial_id, p, re(h), im(h), l, k
struct EstimateRow {
  long trial = 0;
  std::vector<PathEstimate> paths;
};
void write_estimates_csv(const std::filesystem::path& path, const CsvMeta& meta, const std::vector<EstimateRow>& rows);

// One row per grid cell: m, n, re, im, symbol index and bit label (empty for
// known positions).
void write_frame_csv(const std::filesystem::path& path, const CsvMeta& meta, const DDFrame& frame,
                     const DetectorSetup& setup);

// Interleaved little-endian complex64 samples plus a JSON sidecar at
// path + ".json".
void write_waveform(const std::filesystem::path& path, const Waveform& w, const SystemParams& p);
Waveform read_waveform(const std::filesystem::path& path);

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};
// Sequential reduction in index order.
MeanStderr mean_stderr(const std::vector<double>& v);

}  // namespace ddfmcw
