#pragma once

#include <cstddef>
#include <functional>

namespace mtfl {

/// Worker cap: min(hardware_concurrency, MTFL_THREADS) when the env var
/// is set, else hardware_concurrency. Always >= 1.
std::size_t worker_count();

/// Runs fn(i) for i in [0, n). Work is pre-partitioned into fixed
/// contiguous chunks so each index always lands in the same slot
/// regardless of scheduling; callers write results into per-index
/// storage, which keeps outputs identical for any worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &fn);

} // namespace mtfl
