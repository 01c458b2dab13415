#pragma once

#include <cstdint>

namespace rmfpoly::seed {

// SplitMix64 finalizer (Steele, Lea, Flood 2014). All seeded randomness in
// the library goes through this function, so results are portable across
// compilers and standard libraries.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30U)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27U)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31U);
}

/// Seed of the t-th independent stream under `master`.
constexpr std::uint64_t derive(std::uint64_t master, std::uint64_t t) {
  return mix64(mix64(master) ^ mix64(t ^ 0xD1B54A32D192ED03ULL));
}

/// Small counter-based generator; uniform_below is unbiased (rejection).
class Stream {
 public:
  explicit constexpr Stream(std::uint64_t s) : state_(s) {}

  constexpr std::uint64_t next() { return mix64(state_++); }

  constexpr std::uint64_t uniform_below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
      std::uint64_t v = next();
      if (v < limit) return v % bound;
    }
  }

  /// Uniform double in [0, 1) with 53 bits.
  constexpr double uniform01() { return static_cast<double>(next() >> 11U) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace rmfpoly::seed
