#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bgc {

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(begin, end) over contiguous chunks of [0, count). The first
/// exception thrown by any chunk is rethrown after all workers join.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  threads = resolve_threads(threads);
  if (count == 0) return;
  if (threads == 1 || count < 2) {
    body(std::size_t{0}, count);
    return;
  }
  // Small chunks keep the load balanced when per-item cost varies.
  const std::size_t chunk = std::max<std::size_t>(1, count / (threads * 8));
  std::size_t next = 0;
  std::mutex mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      std::size_t begin;
      {
        std::lock_guard lock(mutex);
        if (next >= count || failure) return;
        begin = next;
        next = std::min(count, next + chunk);
      }
      try {
        body(begin, std::min(count, begin + chunk));
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace bgc
