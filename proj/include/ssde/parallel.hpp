// Deterministic parallel loops: each index writes its own output slot, so the
// result never depends on scheduling.
#pragma once

#include <cstddef>
#include <functional>

namespace ssde {

/// Worker count: hardware concurrency, capped by the SSDE_THREADS environment
/// variable when it is set to a positive integer.
std::size_t worker_count();

/// Runs body(i) for i in [0, n). Exceptions from the body are rethrown on the
/// calling thread (the one from the lowest failing index).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ssde
