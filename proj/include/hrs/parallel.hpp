#pragma once

#include <cstddef>
#include <functional>

namespace hrs {

// Worker count: HRS_THREADS if set and positive, otherwise the hardware
// concurrency (0 means auto). Invalid values fall back to auto.
std::size_t worker_count();

// Runs body(begin, end) over a static partition of [0, n). Each index is
// processed exactly once; callers write results into per-index slots so the
// outcome never depends on scheduling. The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace hrs
