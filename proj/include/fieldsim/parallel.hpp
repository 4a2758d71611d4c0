#pragma once

// Deterministic data-parallel loop.  Work items are split into contiguous
// chunks, one per worker; results must be written to per-item slots so that
// the outcome is identical for any worker count.

#include <cstddef>
#include <functional>

namespace fieldsim {

// Worker count from the FIELDSIM_WORKERS environment variable, falling back
// to the hardware concurrency (at least 1).
int worker_count();

// Invokes chunk(begin, end) over a partition of [0, n); serial when a single
// worker is configured.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& chunk);

}  // namespace fieldsim
