#pragma once

// Distances between categorical distributions and the binary-query target
// distribution used to score filtered outputs.

#include <cstddef>
#include <span>

#include "evsparse/types.hpp"

namespace evsparse::metrics {

struct SupportStats {
    std::size_t size = 0;
    double reduction_fraction = 0.0;  // 1 - size / K
};

/// Keeps the classes where p(.|y) >= p(.|ybar) and renormalizes p(.|y) over
/// them. Ties keep the class.
SparseDistribution target_distribution(const Distribution& p_y, const Distribution& p_ybar);

/// -ln sum_k sqrt(p_k q_k); +infinity for disjoint supports. With
/// smoothing > 0 both arguments are mixed toward uniform first:
/// (p + eps) / (1 + K eps).
double bhattacharyya(std::span<const double> p, std::span<const double> q, double smoothing = 0.0);
double bhattacharyya(const SparseDistribution& p, const SparseDistribution& q, double smoothing = 0.0);

// 1-Wasserstein distance with ground metric |i - j| on class indices.
double wasserstein1(std::span<const double> p, std::span<const double> q);
double wasserstein1(const SparseDistribution& p, const SparseDistribution& q);

SupportStats support_stats(const SparseDistribution& d);

}  // namespace evsparse::metrics
