#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace urnlab {

/// SplitMix64 step: advances `state` and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state);

/// xoshiro256** generator. Satisfies UniformRandomBitGenerator so it can be
/// handed to <random> if needed, but every sampler in this library draws
/// through `uniform()` so that streams are identical across platforms.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0);

  /// Independent stream for replica `index` of a run seeded with `seed`.
  ///
  /// The state words are four consecutive SplitMix64 outputs started from
  /// seed ^ (0x9E3779B97F4A7C15 * (index + 1)). Streams depend only on
  /// (seed, index), never on how replicas are scheduled across workers.
  static Rng for_replica(std::uint64_t seed, std::uint64_t index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next(); }
  result_type next();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) by Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound);

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace urnlab
