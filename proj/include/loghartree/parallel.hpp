#ifndef LOGHARTREE_PARALLEL_HPP
#define LOGHARTREE_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace loghartree::par {

inline std::atomic<int>& thread_cap() {
  static std::atomic<int> cap{0};  // 0 = use hardware concurrency
  return cap;
}

inline void set_thread_count(int k) { thread_cap().store(k < 0 ? 0 : k); }

inline int thread_count() {
  int cap = thread_cap().load();
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  return cap > 0 ? std::min(cap, hw) : hw;
}

// Element-wise map over [0, n). Each index is written by exactly one worker,
// so results are bitwise independent of the thread count. Reductions must not
// go through here.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  int nt = thread_count();
  if (nt <= 1 || n < 4096) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t chunk = (n + nt - 1) / nt;
  std::vector<std::thread> workers;
  workers.reserve(nt);
  for (int t = 0; t < nt; ++t) {
    std::size_t lo = t * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    workers.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& w : workers) w.join();
}

}  // namespace loghartree::par

#endif
