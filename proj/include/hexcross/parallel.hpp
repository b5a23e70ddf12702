#pragma once

#include <cstddef>
#include <functional>

namespace hexcross {

// Worker count: HEXCROSS_THREADS if set and positive, else the hardware
// concurrency (at least 1). A positive `requested` wins over both.
int thread_count(int requested = 0);

// Calls fn(i) for i in [0, count) on up to `threads` workers. Jobs must not
// share mutable state; the first exception thrown is rethrown.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace hexcross
