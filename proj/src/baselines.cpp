#include "evsparse/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "evsparse/evidential.hpp"

namespace evsparse::baselines {

SparseDistribution sparsemax(std::span<const double> z) {
    if (z.empty()) throw ValidationError("sparsemax of an empty vector");
    for (std::size_t k = 0; k < z.size(); ++k) {
        if (!std::isfinite(z[k])) throw ValidationError("non-finite logit at index " + std::to_string(k));
    }

    std::vector<double> sorted(z.begin(), z.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());

    // Largest k with 1 + k * z_(k) > sum_{i <= k} z_(i); k = 1 always qualifies.
    double prefix = 0.0;
    double support_sum = sorted[0];
    std::size_t support_size = 1;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        prefix += sorted[i];
        if (1.0 + static_cast<double>(i + 1) * sorted[i] > prefix) {
            support_size = i + 1;
            support_sum = prefix;
        }
    }
    const double tau = (support_sum - 1.0) / static_cast<double>(support_size);

    SparseDistribution out;
    out.num_classes = z.size();
    for (std::size_t k = 0; k < z.size(); ++k) {
        const double p = z[k] - tau;
        if (p > 0.0) {
            out.support.push_back(k);
            out.probs.push_back(p);
        }
    }
    return out;
}

SparseDistribution softmax_passthrough(std::span<const double> logits) {
    return evidential::to_sparse(evidential::softmax(logits));
}

}  // namespace evsparse::baselines
