#pragma once

#include <cstdint>
#include <vector>

#include "urnlab/parallel.hpp"
#include "urnlab/random.hpp"

namespace urnlab {

/// Runs fn(index, rng) for every replica index in [0, reps), where rng is
/// Rng::for_replica(seed, index). Results are stored by index, so the output
/// is identical for any worker count.
template <typename T, typename Fn>
std::vector<T> map_replicas(std::int64_t reps, std::uint64_t seed, int jobs, Fn&& fn) {
  constexpr std::int64_t kBlock = 1024;
  std::vector<T> out(static_cast<std::size_t>(reps));
  const auto blocks = static_cast<std::size_t>((reps + kBlock - 1) / kBlock);
  parallel_for(blocks, jobs, [&](std::size_t b) {
    const std::int64_t lo = static_cast<std::int64_t>(b) * kBlock;
    const std::int64_t hi = std::min(reps, lo + kBlock);
    for (std::int64_t i = lo; i < hi; ++i) {
      Rng rng = Rng::for_replica(seed, static_cast<std::uint64_t>(i));
      out[static_cast<std::size_t>(i)] = fn(i, rng);
    }
  });
  return out;
}

}  // namespace urnlab
