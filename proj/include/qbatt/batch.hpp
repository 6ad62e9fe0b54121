#pragma once

#include <functional>

namespace qbatt::batch {

/// Worker cap for batch loops: OpenMP's limit, further capped by the
/// QBATT_THREADS environment variable. 1 when OpenMP is unavailable.
int max_threads();

/// Serial reference loop: body(0), ..., body(n-1) in order.
void run_serial(int n, const std::function<void(int)>& body);

/// OpenMP loop over the same index space. Bodies must write to disjoint
/// slots; results must not depend on execution order. Falls back to the
/// serial loop when OpenMP is off or max_threads() == 1.
void run_parallel(int n, const std::function<void(int)>& body);

}  // namespace qbatt::batch
