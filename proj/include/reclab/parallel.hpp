#pragma once

#include <cstddef>
#include <functional>

namespace reclab {

// hardware_concurrency, capped by RECLAB_THREADS when set.
std::size_t worker_count();

// Calls fn(i) for i in [0, n) on a bounded pool. fn must be safe to run
// concurrently for distinct i; exceptions are rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace reclab
