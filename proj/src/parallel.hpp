#pragma once

#include <future>
#include <thread>
#include <vector>

namespace semisparse::detail {

// Runs fn(0), ..., fn(n-1) on concurrent threads when the machine has spare
// cores and the per-item work is heavy enough to amortize thread startup,
// otherwise as a plain loop. Items must touch disjoint state; results are
// identical either way.
template <class F>
void parallel_items(int n, long elems_per_item, F&& fn) {
  constexpr long kMinElems = 1L << 15;
  static const unsigned kCores = std::max(1u, std::thread::hardware_concurrency());
  if (n <= 1 || kCores < 2 || elems_per_item < kMinElems) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::future<void>> futures;
  futures.reserve(static_cast<size_t>(n - 1));
  for (int i = 1; i < n; ++i)
    futures.push_back(std::async(std::launch::async, [&fn, i] { fn(i); }));
  fn(0);
  for (auto& f : futures) f.get();
}

}  // namespace semisparse::detail
