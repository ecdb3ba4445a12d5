#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace icl {

// All sampling uses std::mt19937_64, whose output sequence is fixed by the C++ standard.
// The std distributions are implementation-defined, so bounded draws go through
// uniform_below instead.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent sub-seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for the i-th item of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t i);

/// Uniform integer in [0, n) by rejection sampling. n must be > 0.
std::uint64_t uniform_below(Rng& rng, std::uint64_t n);

/// k distinct values from [0, n), uniform without replacement (Floyd's algorithm).
/// Returned in draw order. Requires k <= n.
std::vector<std::uint64_t> sample_without_replacement(Rng& rng, std::uint64_t n, std::uint64_t k);

}  // namespace icl
