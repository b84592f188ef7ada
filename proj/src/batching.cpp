#include "uucc/batching.hpp"

#include <algorithm>
#include <numeric>
#include <span>

#include "uucc/errors.hpp"
#include "uucc/rng.hpp"

namespace uucc {
namespace {

std::vector<std::vector<std::size_t>> slice(std::vector<std::size_t> order, std::size_t parts) {
  std::vector<std::vector<std::size_t>> out(parts);
  const std::size_t base = order.size() / parts;
  const std::size_t extra = order.size() % parts;
  auto it = order.begin();
  for (std::size_t p = 0; p < parts; ++p) {
    const std::size_t len = base + (p < extra ? 1 : 0);
    out[p].assign(it, it + static_cast<std::ptrdiff_t>(len));
    it += static_cast<std::ptrdiff_t>(len);
  }
  return out;
}

}  // namespace

EpochBatches minibatches(std::size_t n, std::size_t n_prime, std::size_t batch_size, std::uint64_t seed) {
  if (batch_size < 2) throw ConfigError("batch size must be >= 2");
  if (n == 0 || n_prime == 0) throw ConfigError("cannot batch an empty unlabeled set");

  EpochBatches epoch;
  const std::size_t largest = std::max(n, n_prime);
  epoch.full_batch_fallback = batch_size > largest;
  std::size_t k = (largest + batch_size - 1) / batch_size;
  k = std::min(k, std::min(n, n_prime));

  Rng rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::size_t> order_prime(n_prime);
  std::iota(order_prime.begin(), order_prime.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));
  rng.shuffle(std::span<std::size_t>(order_prime));

  auto first = slice(std::move(order), k);
  auto second = slice(std::move(order_prime), k);
  epoch.batches.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    epoch.batches[i].first = std::move(first[i]);
    epoch.batches[i].second = std::move(second[i]);
  }
  return epoch;
}

}  // namespace uucc
