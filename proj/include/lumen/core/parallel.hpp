#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace lumen {

/// Worker count: LUMEN_THREADS caps it, default is the available cores.
inline unsigned thread_count() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("LUMEN_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && static_cast<unsigned>(v) < hw) return static_cast<unsigned>(v);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return hw;
}

/// Run fn(y) for y in [0, rows). Each row is processed exactly once; callers
/// must only write to disjoint per-row outputs so results are order-independent.
inline void parallel_rows(int rows, const std::function<void(int)>& fn) {
  unsigned workers = thread_count();
  if (workers <= 1 || rows <= 1) {
    for (int y = 0; y < rows; ++y) fn(y);
    return;
  }
  std::atomic<int> next{0};
  auto run = [&] {
    for (;;) {
      int y = next.fetch_add(1);
      if (y >= rows) return;
      fn(y);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < workers; ++i) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
}

}  // namespace lumen
