#pragma once

#include <cstddef>
#include <functional>

namespace acnet {

// Worker count from ACNET_WORKERS, else the hardware concurrency (at least 1).
unsigned default_workers();

// Runs body(i) for i in [0, n) on at most `workers` threads. Iterations must
// be independent; the first exception thrown is rethrown after all workers join.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

}  // namespace acnet
