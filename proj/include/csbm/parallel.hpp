#pragma once

#include <cstdint>
#include <functional>

namespace csbm {

/// Worker count: CSBM_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int thread_count();

/// Calls body(k) for k in [0, count) on up to `threads` workers. Work is
/// handed out one index at a time from a shared counter, so uneven tasks
/// balance. The first exception thrown by body is rethrown after all
/// workers join.
void parallel_for(std::int64_t count, int threads, const std::function<void(std::int64_t)>& body);

}  // namespace csbm
