#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace regdp {
namespace detail {

// Worker cap: REGDP_THREADS if set (clamped to >= 1), otherwise the number
// of logical processors.
inline int worker_count() {
  if (const char* env = std::getenv("REGDP_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<int>(v);
    return 1;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Evaluate f(0..n-1) with up to worker_count() threads. Results come back in
// index order and any exception is rethrown from the smallest failing index,
// so serial and parallel runs are indistinguishable to the caller.
template <typename T, typename F>
std::vector<T> parallel_map(std::int64_t n, F&& f) {
  std::vector<T> out(static_cast<size_t>(n));
  const int workers = std::min<std::int64_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::int64_t i = 0; i < n; ++i) out[static_cast<size_t>(i)] = f(i);
    return out;
  }

  std::atomic<std::int64_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr error;
  std::int64_t error_index = n;

  const auto body = [&] {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        out[static_cast<size_t>(i)] = f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace detail
}  // namespace regdp
