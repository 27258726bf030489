#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ddfmcw/chirp.hpp"
#include "ddfmcw/modem.hpp"
#include "ddfmcw/params.hpp"
#include "ddfmcw/pulses.hpp"
#include "ddfmcw/rng.hpp"

namespace ddfmcw {

// Delay l and Doppler k are in bins of T/M and 1/(NT).
struct PathParams {
  cplx h{1.0, 0.0};
  double l = 0.0;
  double k = 0.0;
};

struct ChannelRealization {
  std::vector<PathParams> paths;
  double sigma_z2 = 0.0;
};

struct ChannelProfile {
  double l_max_chan = 0.0;
  double k_max = 0.0;
  int P = 4;

  static ChannelProfile from_physical(double tau_max, double nu_max, const SystemParams& p, int P);
};

// Evaluation profile of the simulations: 33.36 us and 5003.46 Hz.
inline constexpr double kTauMax = 33.36e-6;
inline constexpr double kNuMax = 5003.46;

ChannelRealization sample_channel(Rng& rng, int P, double l_max_chan, double k_max);

// Symbol-rate received samples of the delay-Doppler channel (noiseless).
TimeSampleVector apply_channel_noiseless(const TimeSampleVector& s, const std::vector<PathParams>& paths,
                                         const SystemParams& p, const PulseBank& pb);
// As above plus CN(0, sigma_z2) noise drawn from rng.
TimeSampleVector apply_channel_symbol_rate(const TimeSampleVector& s, const ChannelRealization& chan,
                                           const SystemParams& p, const PulseBank& pb, Rng& rng);

// Noiseless delay-Doppler input-output relation evaluated directly in the DD domain.
DDFrame dd_response(const DDFrame& X, const std::vector<PathParams>& paths, const SystemParams& p,
                    const PulseBank& pb);

// Derivatives of a single path's response. d_l and d_k include the gain h;
// unit is the response for h = 1.
struct PathDerivatives {
  CMat unit;
  CMat d_l;
  CMat d_k;
};
PathDerivatives dd_response_derivatives(const DDFrame& X, const PathParams& path, const SystemParams& p,
                                        const PulseBank& pb);

// Oversampled reference: continuous delay-Doppler channel applied to the
// pulse-shaped waveform, with the given cyclic extension.
Waveform apply_channel_continuous(const TimeSampleVector& s, const std::vector<PathParams>& paths,
                                  const PulseBank& pb, int O, CyclicExtension ext);

// Unit-gain responses of the pilot frame, vec'ed. Atoms on the dyadic grid
// 2^-level are cached.
class AtomDictionary {
 public:
  AtomDictionary(const Pilot& pilot, const SystemParams& p, const PulseBank& pb, int level = 12,
                 std::size_t capacity = 4096);

  const CVec& atom(double l, double k);
  CVec compute(double l, double k) const;
  const Pilot& pilot() const { return pilot_; }
  const SystemParams& params() const { return p_; }

 private:
  Pilot pilot_;
  SystemParams p_;
  const PulseBank& pb_;
  int level_;
  std::size_t capacity_;
  std::unordered_map<std::uint64_t, CVec> cache_;
  CVec scratch_;
};

void add_noise(CVec& v, double sigma_z2, Rng& rng);
void add_noise(DDFrame& f, double sigma_z2, Rng& rng);

// sigma_z^2 = E_s * 10^(-EsN0/10)
double noise_variance(double Es, double esn0_db);

std::string channel_to_json(const ChannelRealization& c);
ChannelRealization channel_from_json(const std::string& text);

}  // namespace ddfmcw
