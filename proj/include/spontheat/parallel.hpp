#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace spontheat {

// Runs fn(chunk_begin, chunk_end) over a partition of [begin, end) on up
// to n_threads workers (0 = hardware concurrency). Chunks are contiguous
// and writes must be disjoint per index, so results cannot depend on the
// thread count.
template <typename Fn>
void parallel_for_chunks(std::int64_t begin, std::int64_t end, Fn&& fn,
                         int n_threads = 0) {
  const std::int64_t count = end - begin;
  if (count <= 0) return;
  unsigned workers = n_threads > 0 ? static_cast<unsigned>(n_threads)
                                   : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(
      std::min<std::int64_t>(workers, count));
  if (workers <= 1) {
    fn(begin, end);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const std::int64_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::int64_t lo = begin + static_cast<std::int64_t>(w) * chunk;
    const std::int64_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    threads.emplace_back([&, lo, hi] {
      try {
        fn(lo, hi);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace spontheat
