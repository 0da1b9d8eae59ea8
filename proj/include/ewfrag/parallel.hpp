#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ewfrag {

inline int default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Replicates are cut into fixed chunks regardless of the worker count; each
// chunk accumulates into its own Acc and the chunk results are folded in
// chunk order. Aggregates are therefore identical for any number of workers.
inline constexpr std::uint64_t kReplicateChunk = 4096;

template <class Acc, class Body, class Merge>
Acc run_replicates(std::uint64_t count, int workers, Body body, Merge merge) {
  const std::uint64_t chunks = (count + kReplicateChunk - 1) / kReplicateChunk;
  std::vector<Acc> partial(static_cast<std::size_t>(chunks));
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    try {
      for (std::uint64_t c = next++; c < chunks; c = next++) {
        Acc& acc = partial[static_cast<std::size_t>(c)];
        const std::uint64_t end = std::min(count, (c + 1) * kReplicateChunk);
        for (std::uint64_t r = c * kReplicateChunk; r < end; ++r) body(r, acc);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = chunks;
    }
  };

  const int threads = static_cast<int>(std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::max(workers, 1)), 1, std::max<std::uint64_t>(chunks, 1)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  Acc total{};
  for (auto& acc : partial) merge(total, acc);
  return total;
}

}  // namespace ewfrag
