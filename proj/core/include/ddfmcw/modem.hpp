#pragma once

#include <vector>

#include "ddfmcw/params.hpp"
#include "ddfmcw/pulses.hpp"

namespace ddfmcw {

// Symbol-rate samples ordered q = n_dot * M + m, length MN.
using TimeSampleVector = CVec;

// Oversampled waveform; sample i sits at time (first_index + i) / O in units
// of T/M, so first_index < 0 when a cyclic prefix is present.
struct Waveform {
  std::vector<cplx> samples;
  int O = 1;
  long first_index = 0;
  int cp_len = 0;
  int cs_len = 0;

  double rate_hz(const SystemParams& p) const { return O * p.M / p.T; }
  double start_offset_s(const SystemParams& p) const {
    return static_cast<double>(first_index) / O * p.delay_resolution();
  }
  // Index range of the samples whose time lies in [begin, end) symbol intervals.
  std::pair<long, long> body(long begin, long end) const;
};

struct CyclicExtension {
  int prefix = 0;
  int suffix = 0;
};

TimeSampleVector oddm_modulate(const DDFrame& X);
DDFrame oddm_demodulate(const TimeSampleVector& r, int M, int N);

Waveform synthesize_waveform(const TimeSampleVector& s, const SystemParams& p, const PulseBank& pb,
                             bool with_cp);
Waveform synthesize_waveform(const TimeSampleVector& s, const PulseBank& pb, int O,
                             CyclicExtension ext);
TimeSampleVector matched_filter_sample(const Waveform& w, const PulseBank& pb, int MN);

// Smallest integer >= n whose only prime factors are 2, 3 and 5.
int good_fft_size(int n);

}  // namespace ddfmcw
