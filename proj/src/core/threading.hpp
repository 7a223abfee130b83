#pragma once
#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace td {

inline int effective_threads(int requested) {
  if (requested > 0)
    return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, n). Each index writes only its own outputs, so the
// result is independent of the thread count and of scheduling.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t)> &fn) {
  const int nt = std::min<std::size_t>(effective_threads(threads), n);
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n)
          return;
        fn(i);
      }
    });
  }
  for (auto &th : pool)
    th.join();
}

} // namespace td
