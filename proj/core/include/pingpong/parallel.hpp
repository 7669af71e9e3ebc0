#pragma once

#include <cstddef>
#include <functional>

namespace pingpong {

// Worker count: PINGPONG_THREADS when set and positive, else the hardware
// concurrency (at least 1).  set_thread_count overrides both.
std::size_t thread_count();
void set_thread_count(std::size_t n);

// Runs body(i) for i in [0, n) across the worker count.  Results must be
// written to per-index slots so the outcome is independent of scheduling.
// The first exception thrown by any body is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace pingpong
