#pragma once

#include <cstddef>
#include <functional>
#include <optional>

namespace srforge {

/// Worker count: `requested` when given, else SRFORGE_THREADS, else the
/// hardware concurrency. Always at least 1.
int resolve_threads(std::optional<int> requested = std::nullopt);

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Items are
/// claimed dynamically, so fn must write only to per-item outputs. The first
/// exception thrown by any item is rethrown after all workers finish.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace srforge
