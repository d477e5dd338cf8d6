#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace pcond {

/// Index-parallel loop: body(i) once for every i in [0, n). Deterministic as
/// long as each body writes only to slots addressed by its own index. Runs
/// inline when the machine or the workload is too small to split; the first
/// exception thrown by any worker is rethrown after the join.
inline void parallel_for(int n, const std::function<void(int)>& body, int threads = 0) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::atomic<int> next{0};
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& worker : pool) worker.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace pcond
