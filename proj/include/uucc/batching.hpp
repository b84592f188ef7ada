#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace uucc {

/// Row indices into the two unlabeled sets forming one mini-batch.
struct BatchPair {
  std::vector<std::size_t> first;
  std::vector<std::size_t> second;
};

struct EpochBatches {
  std::vector<BatchPair> batches;
  /// batch_size exceeded both set sizes; the epoch is one full batch.
  bool full_batch_fallback = false;
};

/// Shuffles both sets and slices them into k = ceil(max(n, n') / batch_size) paired
/// batches (capped at min(n, n') so no side is ever empty). Each side is split into
/// k near-equal contiguous slices, larger slices first. Throws ConfigError if
/// batch_size < 2 or a set is empty.
EpochBatches minibatches(std::size_t n, std::size_t n_prime, std::size_t batch_size, std::uint64_t seed);

}  // namespace uucc
