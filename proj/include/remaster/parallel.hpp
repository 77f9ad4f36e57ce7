#pragma once

#include <cstddef>

namespace remaster {

/// Worker count used by kernels. Initialised from REMASTER_THREADS (default:
/// logical cores). Every kernel assigns each output element to exactly one
/// worker and reduces in a fixed order, so results do not depend on this value.
int worker_count();
void set_worker_count(int n);

}  // namespace remaster
