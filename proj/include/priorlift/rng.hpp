#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace priorlift {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Counter-based generator: the k-th output is a pure function of (key, k).
/// Streams keyed by (seed, cell, replicate) therefore do not depend on the
/// order in which replicates are executed.
class CounterRng {
 public:
  explicit CounterRng(std::initializer_list<std::uint64_t> key) noexcept;

  std::uint64_t next() noexcept;

  /// Uniform integer in [0, bound), bound > 0. Unbiased (Lemire rejection).
  std::uint64_t below(std::uint64_t bound) noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// First k entries of a uniformly random permutation of 0..n-1 (partial
/// Fisher-Yates). Draw order is itself uniformly random.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    CounterRng& rng);

}  // namespace priorlift
