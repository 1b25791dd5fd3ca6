#pragma once

#include <cstdint>
#include <random>

namespace waylab {

// Every stochastic component draws from std::mt19937_64, whose output
// sequence is fixed by the C++ standard. Per-task seeds are derived from a
// master seed with the SplitMix64 finalizer so that tasks are independent
// and reproducible regardless of scheduling.
using Rng = std::mt19937_64;

inline constexpr std::uint64_t kDefaultSeed = 20260518;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t key) {
  return splitmix64(splitmix64(master) ^ splitmix64(key + 0x632BE59BD9B4E019ULL));
}

// Uniform double in [0, 1) from the top 53 bits of one generator draw.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace waylab
