#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace humor {

// Runs fn(i) for i in [0, n). With jobs > 1 the index range is split into
// contiguous chunks, one thread per chunk; callers must write results into
// per-index slots so scheduling cannot change the outcome.
template <typename Fn>
void parallel_for(size_t n, unsigned jobs, Fn&& fn) {
  if (jobs <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  unsigned workers = jobs;
  if (static_cast<size_t>(workers) > n) workers = static_cast<unsigned>(n);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    size_t lo = static_cast<size_t>(w) * chunk;
    size_t hi = lo + chunk < n ? lo + chunk : n;
    if (lo >= hi) break;
    threads.emplace_back([lo, hi, &fn]() {
      for (size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace humor
