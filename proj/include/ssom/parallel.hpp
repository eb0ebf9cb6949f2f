// Deterministic parallel-for over an index range. Used only for passes whose
// iterations write disjoint outputs, so results are identical for any thread count.
#pragma once

#include <functional>

namespace ssom {

// Runs fn(i) for i in [begin, end). threads == 0 picks hardware concurrency;
// threads == 1 (or a tiny range) runs inline.
void parallel_for(int begin, int end, int threads, const std::function<void(int)>& fn);

}  // namespace ssom
