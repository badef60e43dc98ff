#pragma once

#include <cstddef>
#include <functional>

namespace ergolab {

// Runs body(i) for i in [0, count) on up to `threads` workers. Bodies write to
// disjoint, index-addressed outputs so results do not depend on scheduling.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

// Process-wide default used by ensemble loops; 1 unless set by the CLI.
unsigned default_threads();
void set_default_threads(unsigned threads);

}  // namespace ergolab
