#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace froglab {

/// Worker count for a request of `threads` (0 = hardware concurrency), never
/// more than `work` items.
inline unsigned resolve_threads(unsigned threads, std::uint64_t work) {
  unsigned t = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  if (work < t) t = static_cast<unsigned>(std::max<std::uint64_t>(work, 1));
  return t;
}

/// Calls fn(worker, i) for i in [0, n) on `workers` threads. Items are handed
/// out in chunks; which worker runs an item is unspecified, so fn must write
/// only to per-item or per-worker state. The first exception is rethrown.
template <class Fn>
void parallel_for(std::uint64_t n, unsigned workers, Fn&& fn, std::uint64_t chunk = 64) {
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < n; ++i) fn(0u, i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&](unsigned w) {
    try {
      for (;;) {
        const std::uint64_t start = next.fetch_add(chunk);
        if (start >= n) break;
        const std::uint64_t stop = std::min(n, start + chunk);
        for (std::uint64_t i = start; i < stop; ++i) fn(w, i);
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next.store(n);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body, w);
  body(0);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace froglab
