#pragma once

#include <cstddef>
#include <functional>

namespace curvkit {

/// Worker count: min(hardware_concurrency, CURVKIT_THREADS if set).
std::size_t worker_count();

/// Runs fn(i) for i in [begin, end) across worker threads. Iterations are
/// claimed dynamically in small chunks; fn must write only to disjoint,
/// per-index state. Exceptions from workers are rethrown on the caller.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

} // namespace curvkit
