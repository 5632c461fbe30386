#pragma once

#include <cstddef>
#include <functional>

namespace riskdyn {

/// Number of workers to use: `requested` if positive, otherwise the
/// RISKDYN_WORKERS environment variable, otherwise the hardware count.
int resolve_workers(int requested);

/// Runs fn(i) for i in [0, count) across `workers` threads. Work is split
/// into contiguous index blocks; results must be written to caller-owned,
/// index-addressed storage so the outcome is independent of scheduling.
/// Exceptions thrown by fn are rethrown on the calling thread.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

} // namespace riskdyn
