#pragma once

#include <cstddef>
#include <functional>

namespace pompif {

/// Runs fn(0..n-1) on up to `workers` threads. Jobs must write only to their own
/// output slots; the first exception thrown by any job is rethrown after all threads join.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace pompif
