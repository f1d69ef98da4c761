#pragma once

#include <cstddef>
#include <functional>

namespace fraclap {

/// Worker count: hardware concurrency, capped by the FRACLAP_THREADS environment variable.
[[nodiscard]] std::size_t worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. The first
/// exception thrown by any task is rethrown after all workers have stopped.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fraclap
