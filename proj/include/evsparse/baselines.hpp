#pragma once

#include <span>

#include "evsparse/types.hpp"

namespace evsparse::baselines {

// Euclidean projection of a logit vector onto the probability simplex.
// Entries landing exactly on the threshold get probability zero.
SparseDistribution sparsemax(std::span<const double> logits);

// Unfiltered softmax as a full-support SparseDistribution.
SparseDistribution softmax_passthrough(std::span<const double> logits);

}  // namespace evsparse::baselines
