#pragma once

#include <cstddef>
#include <functional>

namespace stein_gauge {

/// Worker count: STEIN_GAUGE_THREADS if set (>= 1), otherwise hardware
/// concurrency.
std::size_t worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads.
/// Callers write results into per-index slots and reduce in index order,
/// so the outcome never depends on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace stein_gauge
