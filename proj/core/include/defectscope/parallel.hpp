#pragma once

#include <cstddef>
#include <functional>

namespace dscope {

// Resolve a thread-count request: values <= 0 mean "hardware concurrency".
int resolve_threads(int requested);

// Runs fn(i) for every i in [0, n). Work is statically partitioned into
// contiguous chunks, so callers that write to index-addressed slots get
// output identical to a sequential loop at any thread count. The first
// exception (lowest chunk) is rethrown on the calling thread.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace dscope
