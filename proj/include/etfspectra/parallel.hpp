#pragma once

#include <cstddef>
#include <functional>

namespace etfs {

// Worker count: ETFSPECTRA_THREADS if set and positive, else hardware concurrency.
unsigned worker_count();

// Runs body(i) for i in [0, count). Each index is visited exactly once; results
// should be written to per-index slots so the outcome is order independent.
// The first exception thrown by a worker is rethrown on the caller's thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace etfs
