#pragma once

#include <cstddef>
#include <functional>

namespace structprobe {

/// Worker cap: PROBE_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs fn(0) .. fn(n-1) on up to worker_count() threads. Every task runs to
/// completion; afterwards the exception of the lowest failing index, if any,
/// is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace structprobe
