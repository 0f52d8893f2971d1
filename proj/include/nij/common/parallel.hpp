#pragma once

#include <cstddef>
#include <functional>

namespace nij {

/// Worker count: NIJ_TOOLKIT_THREADS when set to a positive integer, else the
/// hardware concurrency (at least 1).
unsigned thread_limit();

/// Runs body(i) for i in [0, count) on up to thread_limit() threads. Bodies
/// must write only to their own slots. The first exception is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace nij
