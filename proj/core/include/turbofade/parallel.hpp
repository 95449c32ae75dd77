#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace turbofade {

/// Runs body(i, worker) for i in [0, count) on up to `workers` threads.
/// Work items are claimed dynamically; callers make results independent of
/// scheduling by writing per-index slots or per-worker accumulators.
template <class Body>
void parallel_for(std::size_t count, int workers, Body&& body) {
  const int w = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (w <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i, 0);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (int t = 0; t < w; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = next++; i < count; i = next++) body(i, t);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

inline int default_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

}  // namespace turbofade
