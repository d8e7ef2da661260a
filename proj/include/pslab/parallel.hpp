#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace pslab {

inline int thread_cap() {
  if (const char* env = std::getenv("PSLAB_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Runs fn(block) for block = 0..nblocks-1 on up to nthreads workers.
// The block decomposition is fixed by the caller, so any per-block
// results combined in index order are independent of the thread count.
inline void run_blocks(int nblocks, int nthreads,
                       const std::function<void(int)>& fn) {
  if (nthreads <= 1 || nblocks <= 1) {
    for (int b = 0; b < nblocks; ++b) fn(b);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      int b = next.fetch_add(1);
      if (b >= nblocks) return;
      fn(b);
    }
  };
  int nw = std::min(nthreads, nblocks);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

}  // namespace pslab
