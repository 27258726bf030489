#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "ddfmcw/params.hpp"

namespace ddfmcw {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t hash_name(std::string_view s);

// Independent stream for one Monte Carlo trial; depends only on its
// coordinates, never on scheduling.
Rng stream_rng(std::uint64_t master, std::uint64_t kind, std::uint64_t point, std::uint64_t trial);

cplx complex_normal(Rng& rng, double variance);
double uniform(Rng& rng, double lo, double hi);

}  // namespace ddfmcw
