#pragma once

#include <cstddef>
#include <functional>

namespace coagself {

// Worker cap from COAGSELF_THREADS (0 or unset = hardware concurrency).
int worker_count();

// Static-chunked parallel loop over [0, n). Each index is processed by
// exactly one worker and writes only its own outputs, so results are
// bitwise independent of the worker count.
void parallel_for(std::ptrdiff_t n, const std::function<void(std::ptrdiff_t)>& fn);

}  // namespace coagself
