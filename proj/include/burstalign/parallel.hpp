#pragma once

#include <functional>

namespace burstalign {

// Process-wide cap on worker threads. Values < 1 are treated as 1.
void set_thread_count(int n);
int thread_count();

// Runs fn(i) for every i in [begin, end) using up to thread_count() threads.
// Work is split into contiguous static chunks; callers must make each fn(i)
// write only its own outputs so results do not depend on the thread count.
void parallel_for(int begin, int end, const std::function<void(int)>& fn);

}  // namespace burstalign
