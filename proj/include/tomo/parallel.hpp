#pragma once

#include <functional>

namespace tomo {

/// Global worker count for parallel loops; 1 = fully sequential reference behavior.
void set_thread_count(int n);
int thread_count();

/// Run fn(i) for i in [begin, end). Work is split into contiguous index blocks,
/// one per worker; every fn(i) must write only to i-dependent locations, which
/// keeps results bit-identical to sequential execution.
void parallel_for(int64_t begin, int64_t end, const std::function<void(int64_t)>& fn);

/// Block variant: fn(block_begin, block_end) per worker.
void parallel_for_blocked(int64_t begin, int64_t end,
                          const std::function<void(int64_t, int64_t)>& fn);

}  // namespace tomo
