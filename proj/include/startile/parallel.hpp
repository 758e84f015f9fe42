#pragma once

#include <cstddef>
#include <functional>

namespace startile {

// Worker cap: TILE_THREADS when set to a positive integer, else the hardware
// concurrency.
unsigned worker_count();

// Runs fn(i) for i in [0, n) on up to worker_count() threads. Work is split
// into contiguous blocks, so results written per index are deterministic. The
// first exception thrown by a worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace startile
