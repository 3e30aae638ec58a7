#pragma once

#include <cstddef>
#include <functional>

namespace motiondex {

// DRE_THREADS when set to a positive integer, otherwise hardware concurrency.
std::size_t default_thread_count();

// Calls fn(i) for every i in [0, n) on up to `threads` workers (0 selects
// default_thread_count()). Each index runs exactly once; callers write results
// into per-index slots so output order never depends on scheduling. The first
// exception thrown by any worker is rethrown on the calling thread.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace motiondex
