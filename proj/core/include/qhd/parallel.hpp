#pragma once

#include <cstddef>
#include <functional>

namespace qhd {

/// Caps worker threads for data-parallel loops. 0 selects the hardware
/// concurrency. The initial value comes from QHD_THREADS when set.
void set_thread_count(std::size_t threads);
std::size_t thread_count();

/// Calls body(lo, hi) on disjoint chunks covering [begin, end).
///
/// Chunks are contiguous and each index is visited exactly once, so bodies
/// that only write to their own indices give identical results for every
/// thread count. Reductions must not be done inside the body.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 1024);

}  // namespace qhd
