#pragma once

/// @file parallel.hpp
/// @brief Data-parallel loops capped by the SHEARFLOW_THREADS environment variable.

#include <cstddef>
#include <functional>

namespace shearflow {

/// Thread cap: SHEARFLOW_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int thread_cap();

/// Overrides the cap for the current process (0 restores the environment value).
void set_thread_cap(int threads);

/// Calls fn(i) for i in [0, count). Iterations must be independent; results
/// do not depend on the number of threads.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

} // namespace shearflow
