#pragma once

#include <cstddef>
#include <functional>

namespace ivtf {

/// 0 means "all hardware threads".
unsigned resolve_threads(unsigned requested);

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Work items are
/// claimed dynamically, so callers must make fn(i) depend only on i. The
/// first exception thrown by any item is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace ivtf
