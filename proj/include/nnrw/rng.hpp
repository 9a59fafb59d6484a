#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace nnrw {

/// The single pseudorandom source used everywhere: std::mt19937_64 (whose
/// output sequence is fixed by the C++ standard) with distribution code written
/// here, so a seed gives the same numbers under every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on [-1, 1).
  double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

  /// Uniform integer in [lo, hi], unbiased by rejection.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);

  /// Fisher-Yates, last position first.
  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_int(0, i - 1));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Seed of trial `trial` in a run started from `base_seed`.
inline std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial) { return base_seed + trial; }

/// Seed for data partitioning in a trial, decorrelated from the init stream.
inline std::uint64_t split_seed(std::uint64_t seed) { return seed ^ 0x9E3779B97F4A7C15ULL; }

}  // namespace nnrw
