#pragma once

#include <cstddef>
#include <functional>

namespace wallforge {

/// Worker count from WALLFORGE_THREADS (positive integer), falling back to
/// the hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs task(i) for i = 0..n−1 on at most `workers` threads. Tasks must be
/// independent; results are written by the tasks themselves, so output order
/// never depends on scheduling. The first exception (lowest index) is
/// rethrown after all tasks have finished.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task,
                  std::size_t workers = worker_count());

}  // namespace wallforge
