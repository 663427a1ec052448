#pragma once

#include <cstddef>
#include <functional>

namespace ies {

/// Worker cap for every parallel loop in the library. 0 means hardware concurrency.
void set_thread_limit(unsigned threads);
unsigned thread_limit();

/// Runs body(begin, end) over contiguous chunks of [0, count). Each index is
/// visited exactly once; callers write results into disjoint slots and reduce
/// afterwards in index order, so output does not depend on the thread count.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 256);

}  // namespace ies
