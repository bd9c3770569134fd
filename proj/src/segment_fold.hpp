#pragma once

// Parallel fold over radicals of [1, x] in fixed-size segments. Partial
// results are kept per segment and reduced in segment order, so the result
// does not depend on scheduling.

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "nuclear/arith.hpp"

namespace nuclear::detail {

inline constexpr u64 kFoldSpan = u64{1} << 17;

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// visit(lo, hi, rad, acc) where rad[i] = k(lo + i).
template <class Acc, class Visit, class Reduce>
Acc fold_radicals(u64 x, const PrimeTable& primes, unsigned threads, Acc init,
                  Visit visit, Reduce reduce) {
  if (x == 0) return init;
  const u64 segments = (x + kFoldSpan - 1) / kFoldSpan;
  std::vector<Acc> partial(segments, init);
  std::atomic<u64> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    std::vector<u64> rad(kFoldSpan), smooth(kFoldSpan);
    try {
      for (u64 idx = next++; idx < segments; idx = next++) {
        const u64 lo = idx * kFoldSpan + 1;
        const u64 hi = std::min(x, lo + kFoldSpan - 1);
        const std::size_t len = hi - lo + 1;
        sieve_radicals(lo, hi, primes.primes, std::span(rad).first(len),
                       std::span(smooth).first(len));
        visit(lo, hi, std::span<const u64>(rad).first(len), partial[idx]);
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next = segments;
    }
  };

  const unsigned n = std::max(1u, std::min<unsigned>(resolve_threads(threads),
                                                     static_cast<unsigned>(segments)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  Acc total = init;
  for (const Acc& p : partial) total = reduce(total, p);
  return total;
}

}  // namespace nuclear::detail
