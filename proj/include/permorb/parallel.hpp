#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace permorb {

/// Runs body(worker, begin, end) over a static partition of [0, count) into
/// at most `threads` contiguous ranges. Worker 0 runs on the calling thread.
/// The first exception thrown by any worker is rethrown after all join.
template <class Body>
void parallel_ranges(std::size_t count, unsigned threads, Body&& body) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, count));
  if (workers == 1) {
    body(std::size_t{0}, std::size_t{0}, count);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto guarded = [&](std::size_t w, std::size_t b, std::size_t e) {
    try {
      body(w, b, e);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  const auto bounds = [&](std::size_t w) { return count * w / workers; };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(guarded, w, bounds(w), bounds(w + 1));
    guarded(0, bounds(0), bounds(1));
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace permorb
