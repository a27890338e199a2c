#pragma once

#include <cstddef>
#include <functional>

namespace muentropy {

// Thread cap: min(hardware, MUENTROPY_THREADS) with MUENTROPY_THREADS read
// once at first use.
int max_threads();

// Runs fn(i) for i in [0, count). Work is partitioned statically by index and
// any result written to slot i of a caller-owned buffer, so the outcome does
// not depend on the schedule. Falls back to a serial loop when count is small
// or only one thread is allowed. Exceptions from workers are rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace muentropy
