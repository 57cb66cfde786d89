#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hexagait {

// Every random draw in the project goes through Rng. The engine is
// std::mt19937_64 (fully specified by the standard); the uniform/normal
// conversions are written out here because the std distributions are
// implementation-defined and would make runs differ across toolchains.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi] (inclusive), unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  bool bernoulli(double p) { return uniform() < p; }
  /// Standard normal via the Marsaglia polar method.
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Derives the seed of an independent named stream from a master seed:
/// mix64(master ^ mix64(fnv1a(name) + index)). Streams used: "init",
/// "reproduction" (indexed by generation), "terrain".
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                          std::uint64_t index = 0);

/// FNV-1a 64-bit hash; also used for manifest fingerprints.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace hexagait
