#pragma once

#include <cstdint>
#include <random>

namespace qfg {

using Rng = std::mt19937_64;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Deterministic per-trial stream: trials are reproducible bit-for-bit for a
// given master seed no matter how they are distributed over workers.
inline Rng make_trial_rng(std::uint64_t master_seed, std::uint64_t trial_index) {
  std::uint64_t x = master_seed;
  std::uint64_t a = detail::splitmix64(x);
  x ^= trial_index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL;
  std::uint64_t b = detail::splitmix64(x);
  return Rng(a ^ (b + 0x9e3779b97f4a7c15ULL));
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_double(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) { return uniform_double(rng) < p; }

}  // namespace qfg
