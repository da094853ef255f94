#pragma once

#include <cstddef>
#include <functional>

namespace robustiv {

/// Worker cap used by parallel_for. 0 means "not set": fall back to the
/// ROBUSTIV_THREADS environment variable, then hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(i) for i in [0, count). Tasks are independent; callers write
/// results into per-index slots so the outcome does not depend on scheduling.
/// The first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace robustiv
