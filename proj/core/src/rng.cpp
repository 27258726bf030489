#include "ddfmcw/rng.hpp"

#include <cmath>

namespace ddfmcw {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_name(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Rng stream_rng(std::uint64_t master, std::uint64_t kind, std::uint64_t point, std::uint64_t trial) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ kind);
  h = splitmix64(h ^ point);
  h = splitmix64(h ^ trial);
  std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return Rng(seq);
}

cplx complex_normal(Rng& rng, double variance) {
  std::normal_distribution<double> nd(0.0, std::sqrt(variance / 2.0));
  const double re = nd(rng);
  const double im = nd(rng);
  return {re, im};
}

double uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> ud(lo, hi);
  return ud(rng);
}

}  // namespace ddfmcw
