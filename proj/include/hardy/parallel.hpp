#pragma once

#include <cstddef>
#include <functional>

namespace hardy {

/// Worker count: HARDY_THREADS when set to a positive integer, otherwise the
/// hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0, n). Iterations must write disjoint outputs; the
/// result is then independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace hardy
