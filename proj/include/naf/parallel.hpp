#pragma once

#include <cstddef>
#include <functional>

namespace naf {

// Worker count: NAF_THREADS if set and positive, otherwise hardware
// concurrency (at least 1).
std::size_t thread_count();

// Calls body(i) for i in [0, count) across thread_count() workers. Each index
// runs exactly once; callers write results into slot i, so output order does
// not depend on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace naf
