#pragma once

#include <cstddef>
#include <functional>

namespace prandtl3d {

// Number of worker threads used by parallel_for. Values below 1 reset to 1.
void set_thread_count(int n);
int thread_count();

// Calls fn(i) for i in [begin, end). Work is split into contiguous blocks, one
// per thread; callers must only write to outputs owned by index i, so results
// do not depend on the thread count.
void parallel_for(std::ptrdiff_t begin, std::ptrdiff_t end,
                  const std::function<void(std::ptrdiff_t)>& fn);

}  // namespace prandtl3d
