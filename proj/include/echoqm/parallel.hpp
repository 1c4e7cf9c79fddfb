#pragma once

#include <functional>

namespace echoqm {

/// Runs fn(i) for i in [0, n) on `workers` threads (0 = hardware concurrency).
/// The first exception thrown stops the remaining work and is rethrown.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

}  // namespace echoqm
