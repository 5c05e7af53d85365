#pragma once

#include <functional>

namespace qkr {

// Runs fn(i) for every i in [0, n). With threads <= 1 the loop is inline and
// ordered; otherwise a worker pool consumes indices from a shared counter.
// Tasks must be independent; callers keep determinism by storing results
// into slot i. The first exception thrown by any task is rethrown after all
// workers finish.
void parallel_for_indexed(int n, int threads, const std::function<void(int)>& fn);

}  // namespace qkr
