#pragma once

// Static-partition work pool. Item i always lands in slot i of whatever the
// caller pre-sized, so results are identical for every thread count.

#include <algorithm>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace veritor {

inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t)>& body) {
  if (threads < 1) threads = 1;
  if (threads == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(nt);
  for (std::size_t w = 0; w < nt; ++w) {
    std::size_t lo = n * w / nt;
    std::size_t hi = n * (w + 1) / nt;
    pool.emplace_back([&errs, &body, lo, hi, w] {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace veritor
