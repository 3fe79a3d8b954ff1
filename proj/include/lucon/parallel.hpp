#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace lucon {

/// Resolves a user thread count: 0 means hardware concurrency.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

/// Splits [0, n) into `threads` contiguous chunks and calls
/// body(begin, end, worker) for each chunk. Worker w always receives the w-th
/// chunk. The first exception thrown by any worker is rethrown.
template <typename Body>
void parallel_chunks(std::size_t n, int threads, Body&& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n < 2) {
    body(std::size_t{0}, n, 0);
    return;
  }
  const std::size_t used = std::min(workers, n);
  std::vector<std::exception_ptr> errors(used);
  std::vector<std::thread> pool;
  pool.reserve(used);
  for (std::size_t w = 0; w < used; ++w) {
    const std::size_t begin = n * w / used;
    const std::size_t end = n * (w + 1) / used;
    pool.emplace_back([&, begin, end, w] {
      try {
        body(begin, end, static_cast<int>(w));
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Number of chunks parallel_chunks will use for n items.
inline std::size_t chunk_count(std::size_t n, int threads) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n < 2) return 1;
  return std::min(workers, n);
}

}  // namespace lucon
