#pragma once

#include <thread>
#include <vector>

#include "hommb/errors.hpp"

namespace hommb {

/// Run fn(i) for i in [0, n) on nThreads workers, blocking until all finish.
/// Work items must write to disjoint state. nThreads == 1 runs inline, which
/// is the bitwise-reproducible reference path.
template <typename Fn>
inline void parallel_for(int n, int nThreads, Fn&& fn) {
  HOMMB_REQUIRE(nThreads >= 1, "thread count");
  if (nThreads == 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  const int workers = std::min(nThreads, n);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (int i = w; i < n; i += workers) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

} // namespace hommb
