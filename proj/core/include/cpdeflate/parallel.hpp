#pragma once

#include <functional>

namespace cpdeflate {

/// Worker count: CPDEFLATE_THREADS if set to a positive integer, otherwise
/// std::thread::hardware_concurrency() (at least 1).
int thread_budget();

/// Runs body(0..count-1) on up to `threads` workers (0 = thread_budget()).
/// Indices are handed out dynamically; callers write results by index, so the
/// outcome does not depend on scheduling. The exception from the lowest
/// failing index, if any, is rethrown after all workers finish.
void parallel_for(int count, const std::function<void(int)>& body, int threads = 0);

}  // namespace cpdeflate
