#pragma once

#include <cstddef>
#include <functional>

namespace zipper {

// Worker count from the ZIPPER_THREADS environment variable, falling back
// to the hardware concurrency.
std::size_t thread_count();

// Calls body(i) for every i in [0, count) on up to `threads` workers
// (0 = thread_count()). Rethrows the exception of the lowest failing index.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t threads = 0);

}  // namespace zipper
