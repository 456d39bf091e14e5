#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace flagdyn {

// Worker count: explicit request > FLAGDYN_THREADS > hardware.
inline int thread_count(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FLAGDYN_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? int(hw) : 1;
}

// Deterministic parallel loop: the work item for index i writes only to slot i
// of the caller's output, so the result is independent of the thread count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                         int requested_threads = 0) {
  int workers = std::min<std::size_t>(thread_count(requested_threads), n ? n : 1);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = std::size_t(w); i < n; i += std::size_t(workers)) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace flagdyn
