#pragma once

#include <cstddef>
#include <functional>

namespace hpl {

/// Worker count: HPL_THREADS if set and positive, else hardware concurrency.
std::size_t thread_count();

/// Runs body(i) for i in [0, count) over up to thread_count() workers.
/// Each index is handled exactly once; callers write results into
/// preallocated slots so the outcome is independent of scheduling.
/// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace hpl
