#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace metabbo {

/// Seeded generator with platform-independent draws.
///
/// The engine is std::mt19937_64 (fully specified by the standard); the
/// distributions are implemented here because the standard library ones are
/// implementation-defined, which would break bitwise reproducibility of
/// reports across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);

  /// Standard normal via Box-Muller (one value per call, no caching).
  double normal();

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to derive independent seed streams.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Order-sensitive combination of seed components.
std::uint64_t combine_seed(std::uint64_t a, std::uint64_t b) noexcept;

}  // namespace metabbo
