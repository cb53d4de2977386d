#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace retlab {

/// Runs fn(i) for i in [0, count) on up to `workers` threads. Work items are
/// claimed dynamically; callers write results into slot i so the output
/// order never depends on scheduling. The first exception is rethrown.
template <class Fn>
void parallel_for(std::uint64_t count, unsigned workers, Fn&& fn) {
  workers = std::max(1U, workers);
  if (workers == 1 || count <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n = static_cast<unsigned>(std::min<std::uint64_t>(workers, count));
  pool.reserve(n);
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace retlab
