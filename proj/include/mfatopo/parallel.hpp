#pragma once

#include <cstddef>
#include <functional>

namespace mfatopo {

// Runs fn(i) for i in [0, n) on a work-stealing pool of `threads` workers.
// Callers write results into per-index slots, so output never depends on
// scheduling. threads <= 0 means "all hardware threads".
void parallel_for_each(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

int hardware_threads();

}  // namespace mfatopo
