#pragma once

#include <cstddef>
#include <functional>

namespace systolic {

/// Worker count: hardware concurrency, capped by the TOOL_THREADS
/// environment variable when set to a positive integer.
std::size_t thread_count();

/// Run body(i) for i in [0, n) across up to `threads` workers (0 = thread_count()).
/// Each index is visited exactly once; the first exception thrown by any
/// worker is rethrown on the calling thread after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t threads = 0);

}  // namespace systolic
