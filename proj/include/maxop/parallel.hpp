#pragma once

#include <cstddef>
#include <functional>

namespace maxop {

/// Number of worker threads: MAXOP_THREADS if set (>= 1), else
/// hardware_concurrency.
unsigned worker_count();

/// Run fn(i) for i in [0, n). Work items must be independent; results should
/// be written to disjoint slots so the outcome does not depend on scheduling.
/// Exceptions are rethrown for the smallest failing index.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace maxop
