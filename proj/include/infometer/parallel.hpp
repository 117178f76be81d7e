#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace infometer {

/// Number of worker threads for replicate-level parallelism. Never changes results.
struct Workers {
  std::size_t count = 1;
};

/// Reads INFOMETER_WORKERS; falls back to 1.
Workers workers_from_env();

/// Runs fn(i) for i in [0, n) on `workers` threads. Each index is executed
/// exactly once; callers write results into slot i, so the outcome does not
/// depend on scheduling.
template <class Fn>
void parallel_for(std::size_t n, Workers workers, Fn&& fn) {
  const std::size_t threads = std::min(std::max<std::size_t>(workers.count, 1), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(threads - 1);
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(body);
  body();
  pool.clear();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace infometer
