#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace oudiff {

// Runs fn(0..n-1) across a worker pool. Each index must write only to its own
// output slot; with per-index RNG streams the result is identical for any
// worker count.
inline void parallel_for(long n, const std::function<void(long)>& fn,
                         int workers = 0) {
  if (workers <= 0)
    workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  if (workers == 1 || n < 2) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  auto worker = [&]() {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

}  // namespace oudiff
