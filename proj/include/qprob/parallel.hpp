#pragma once

#include <cstddef>
#include <functional>

namespace qprob {

// Worker count for sweeps. 0 resets to the QPROB_THREADS environment value (default 1).
void set_threads(unsigned n);
unsigned threads();

// Calls f(i) for i in [0, n); results must be written by index so the outcome
// does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

}  // namespace qprob
