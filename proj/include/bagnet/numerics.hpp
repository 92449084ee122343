#pragma once

#include <cstddef>
#include <span>

namespace bagnet {

// Correctly rounded sum of a sequence of finite doubles (Shewchuk expansion,
// same algorithm as Python's math.fsum). The result depends only on the
// multiset of inputs, so it is invariant under permutation, and doubling
// every input doubles the result exactly. Bag-level aggregation relies on
// both properties.
double exact_sum(std::span<const double> xs);

// exact_sum(xs) / xs.size(), clamped into [min(xs), max(xs)] so the mean of
// probabilities can never leave the data range by a rounding step.
double exact_mean(std::span<const double> xs);

}  // namespace bagnet
