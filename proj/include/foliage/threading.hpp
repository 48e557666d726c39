#pragma once

#include <cstddef>
#include <functional>

namespace foliage {

/// Resolve a user-facing thread count: 0 means "auto" (hardware concurrency).
int resolve_threads(int requested);

/// Runs fn(i) for i in [0, n) across `threads` workers with static chunking.
/// Each index is processed exactly once; callers must make fn(i) independent
/// of execution order.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

} // namespace foliage
