#pragma once

#include <cstddef>
#include <functional>

namespace cmdnls {

// Size of the task pool: hardware concurrency, capped by CMDNLS_THREADS.
int worker_count();

// Runs body(i) for i in [0, n) on up to worker_count() threads. Tasks must not
// share mutable state; the first exception thrown by any task is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace cmdnls
