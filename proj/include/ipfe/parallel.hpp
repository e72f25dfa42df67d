#pragma once

#include <cstddef>
#include <functional>

namespace ipfe {

/// Resolve a thread count: explicit value if > 0, else IPFE_THREADS, else 1.
std::size_t resolve_threads(std::size_t requested);

/// Run body(i) for i in [0, count) on up to `threads` workers. Each index is
/// executed exactly once; callers write results into per-index slots so the
/// outcome does not depend on scheduling.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

} // namespace ipfe
