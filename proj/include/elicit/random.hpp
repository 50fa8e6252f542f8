#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace elicit {

/// Seeded generator with platform-independent draws. The standard
/// distributions are implementation-defined, so bounded integers and unit
/// reals are derived from the raw 64-bit stream here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). `bound` must be non-zero.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform real in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform real in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  /// Standard normal via Box-Muller.
  double normal();

  /// Fills `out` with a uniform permutation of 1..out.size().
  void permutation(std::span<double> out);

 private:
  std::mt19937_64 engine_;
};

/// Derives an independent stream seed for sub-task `index` of a run seeded
/// with `seed` (splitmix64 finalizer). Keeps parallel results independent of
/// thread count and scheduling.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace elicit
