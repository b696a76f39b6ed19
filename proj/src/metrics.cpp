#include "evsparse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace evsparse::metrics {

namespace {

void require_same_length(std::size_t a, std::size_t b) {
    if (a != b) {
        throw ValidationError("distributions have different lengths: " + std::to_string(a) +
                              " vs " + std::to_string(b));
    }
}

}  // namespace

SparseDistribution target_distribution(const Distribution& p_y, const Distribution& p_ybar) {
    require_same_length(p_y.num_classes(), p_ybar.num_classes());
    SparseDistribution out;
    out.num_classes = p_y.num_classes();
    double total = 0.0;
    for (std::size_t k = 0; k < p_y.probs.size(); ++k) {
        if (p_y.probs[k] >= p_ybar.probs[k] && p_y.probs[k] > 0.0) {
            out.support.push_back(k);
            out.probs.push_back(p_y.probs[k]);
            total += p_y.probs[k];
        }
    }
    if (out.support.empty()) throw NumericalGuardError("target distribution has empty support");
    for (double& p : out.probs) p /= total;
    return out;
}

double bhattacharyya(std::span<const double> p, std::span<const double> q, double smoothing) {
    require_same_length(p.size(), q.size());
    if (smoothing < 0.0) throw ValidationError("smoothing must be nonnegative");
    const double denom = 1.0 + static_cast<double>(p.size()) * smoothing;
    double coefficient = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        coefficient += std::sqrt((p[k] + smoothing) / denom * ((q[k] + smoothing) / denom));
    }
    if (coefficient <= 0.0) return std::numeric_limits<double>::infinity();
    return std::max(0.0, -std::log(coefficient));
}

double bhattacharyya(const SparseDistribution& p, const SparseDistribution& q, double smoothing) {
    return bhattacharyya(p.dense(), q.dense(), smoothing);
}

double wasserstein1(std::span<const double> p, std::span<const double> q) {
    require_same_length(p.size(), q.size());
    double cdf_gap = 0.0;
    double distance = 0.0;
    for (std::size_t k = 0; k + 1 < p.size(); ++k) {
        cdf_gap += p[k] - q[k];
        distance += std::abs(cdf_gap);
    }
    return distance;
}

double wasserstein1(const SparseDistribution& p, const SparseDistribution& q) {
    return wasserstein1(p.dense(), q.dense());
}

SupportStats support_stats(const SparseDistribution& d) {
    if (d.num_classes == 0) throw ValidationError("support_stats of an empty distribution");
    return {d.support.size(),
            1.0 - static_cast<double>(d.support.size()) / static_cast<double>(d.num_classes)};
}

}  // namespace evsparse::metrics
