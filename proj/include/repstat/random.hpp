#pragma once

// Seeding and uniform draws with bit-exact output across standard libraries.
// std::*_distribution is implementation-defined, so samplers here go through
// uniform01 instead.

#include <cstdint>
#include <random>

namespace repstat {

using Seed = std::uint64_t;
using Rng = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent sub-stream seed for item `index` of stream `stream`.
inline constexpr Seed derive_seed(Seed seed, std::uint64_t stream, std::uint64_t index = 0) {
  return splitmix64(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL)) + index);
}

/// Uniform double in [0, 1) from the top 53 bits of one 64-bit draw.
template <class URBG>
double uniform01(URBG& rng) {
  static_assert(URBG::min() == 0 && URBG::max() == ~std::uint64_t{0}, "expects a full-range 64-bit generator");
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) by rejection, n >= 1.
template <class URBG>
std::uint64_t uniform_below(URBG& rng, std::uint64_t n) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

}  // namespace repstat
