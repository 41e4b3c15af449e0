#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace scaling_lens {

/// Process-wide worker cap used when a call passes threads = 0.
void set_max_threads(unsigned threads);
unsigned max_threads();

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = max_threads()).
/// Work items must write only to their own slot; the first exception thrown
/// by any item is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  unsigned threads = 0);

/// Pairwise (cascade) summation in index order; the result does not depend on
/// how the values were produced.
double pairwise_sum(std::span<const double> values);

}  // namespace scaling_lens
