#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace meshforge {

inline int hardwareThreads() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

// Runs fn(i) for i in [begin, end). Work is split into fixed-size chunks so
// that per-chunk results never depend on the thread count; outputs must be
// written to disjoint locations indexed by i.
template <typename F>
void parallelFor(std::int64_t begin, std::int64_t end, F&& fn, std::int64_t chunk = 1024) {
  if (end <= begin) return;
  const std::int64_t n = end - begin;
  int threads = hardwareThreads();
  if (threads <= 1 || n <= chunk) {
    for (std::int64_t i = begin; i < end; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{begin};
  auto worker = [&]() {
    for (;;) {
      std::int64_t lo = next.fetch_add(chunk);
      if (lo >= end) return;
      std::int64_t hi = lo + chunk < end ? lo + chunk : end;
      for (std::int64_t i = lo; i < hi; ++i) fn(i);
    }
  };
  std::vector<std::thread> pool;
  int spawn = static_cast<int>(std::min<std::int64_t>(threads, (n + chunk - 1) / chunk));
  pool.reserve(spawn - 1);
  for (int t = 1; t < spawn; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

// Deterministic parallel reduction: fn(chunkIndex, lo, hi) fills
// partial[chunkIndex]; partials are combined by the caller in chunk order.
// Chunk boundaries depend only on `chunk`, never on the thread count.
template <typename Partial, typename F>
std::vector<Partial> parallelChunks(std::int64_t n, std::int64_t chunk, F&& fn) {
  std::int64_t chunks = n <= 0 ? 0 : (n + chunk - 1) / chunk;
  std::vector<Partial> partials(static_cast<std::size_t>(chunks));
  parallelFor(
      0, chunks,
      [&](std::int64_t c) {
        std::int64_t lo = c * chunk;
        std::int64_t hi = std::min(n, lo + chunk);
        fn(partials[static_cast<std::size_t>(c)], lo, hi);
      },
      1);
  return partials;
}

}  // namespace meshforge
