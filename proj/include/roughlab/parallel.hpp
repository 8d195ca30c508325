#ifndef ROUGHLAB_PARALLEL_HPP
#define ROUGHLAB_PARALLEL_HPP

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace roughlab {

inline int resolve_workers(int workers) {
  if (workers > 0) return std::min(workers, 64);
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 64u));
}

/// Runs fn(i) for i in [0, count) across `workers` threads, static block
/// partition. Callers write results into preallocated per-index slots and
/// reduce afterwards, so the outcome never depends on the worker count.
template <class Fn>
void parallel_for(std::int64_t count, int workers, Fn&& fn) {
  workers = resolve_workers(workers);
  if (count <= 0) return;
  if (workers == 1 || count == 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::int64_t nthreads = std::min<std::int64_t>(workers, count);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nthreads));
  std::exception_ptr error;
  std::mutex error_mutex;
  for (std::int64_t t = 0; t < nthreads; ++t) {
    const std::int64_t lo = count * t / nthreads;
    const std::int64_t hi = count * (t + 1) / nthreads;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::int64_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace roughlab

#endif  // ROUGHLAB_PARALLEL_HPP
