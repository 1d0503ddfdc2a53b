#pragma once

#include <cstddef>
#include <functional>

namespace surrokit::app {

// Runs task(0) .. task(count - 1) on up to `jobs` threads. Tasks are claimed in
// index order; if any throw, the exception from the lowest failing index is
// rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& task);

}  // namespace surrokit::app
