#pragma once

#include <cstddef>
#include <functional>

namespace pcm {

// 0 (or negative) means one worker per hardware thread
int resolve_workers(int workers);

// run fn(0 .. count-1) across the given number of workers; indexes are
// claimed atomically, so callers must write results into per-index slots.
// If any invocation throws, every claimed index still runs and the
// exception with the lowest index is rethrown, keeping failures
// deterministic regardless of scheduling.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace pcm
