#include "evsparse/evidential.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace evsparse::evidential {

namespace {

void require_features(const std::vector<double>::size_type expected, std::span<const double> phi) {
    if (phi.size() != expected) {
        std::ostringstream os;
        os << "feature vector has length " << phi.size() << ", model expects " << expected;
        throw ValidationError(os.str());
    }
    for (std::size_t j = 0; j < phi.size(); ++j) {
        if (!std::isfinite(phi[j])) {
            std::ostringstream os;
            os << "non-finite feature at index " << j;
            throw ValidationError(os.str());
        }
    }
}

}  // namespace

void validate(const LastLayerParams& params) {
    const std::size_t K = params.num_classes();
    const std::size_t J = params.num_features();
    if (K < 2) throw ValidationError("model needs at least 2 classes, got " + std::to_string(K));
    if (J < 1) throw ValidationError("model needs at least 1 feature");
    if (params.bias.size() != K) {
        throw ValidationError("bias has length " + std::to_string(params.bias.size()) +
                              ", expected " + std::to_string(K));
    }
    if (!params.class_labels.empty() && params.class_labels.size() != K) {
        throw ValidationError("class_labels has " + std::to_string(params.class_labels.size()) +
                              " entries, expected " + std::to_string(K));
    }
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t j = 0; j < J; ++j) {
            if (!std::isfinite(params.weights(k, j))) {
                throw ValidationError("non-finite weight at [" + std::to_string(k) + "][" +
                                      std::to_string(j) + "]");
            }
        }
        if (!std::isfinite(params.bias[k])) {
            throw ValidationError("non-finite bias at [" + std::to_string(k) + "]");
        }
    }
}

CenteredParams center_params(const LastLayerParams& raw) {
    validate(raw);
    const std::size_t K = raw.num_classes();
    const std::size_t J = raw.num_features();
    const double inv_k = 1.0 / static_cast<double>(K);

    CenteredParams out{raw.weights, raw.bias};
    for (std::size_t j = 0; j < J; ++j) {
        double mean = 0.0;
        for (std::size_t k = 0; k < K; ++k) mean += raw.weights(k, j);
        mean *= inv_k;
        for (std::size_t k = 0; k < K; ++k) out.beta(k, j) -= mean;
    }
    const double bias_mean = std::accumulate(raw.bias.begin(), raw.bias.end(), 0.0) * inv_k;
    for (double& b : out.beta0) b -= bias_mean;
    return out;
}

std::vector<double> logits(const LastLayerParams& raw, std::span<const double> phi) {
    require_features(raw.num_features(), phi);
    std::vector<double> out(raw.num_classes());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const auto row = raw.weights.row(k);
        out[k] = raw.bias[k] + std::inner_product(row.begin(), row.end(), phi.begin(), 0.0);
    }
    return out;
}

Distribution softmax(std::span<const double> z) {
    if (z.empty()) throw ValidationError("softmax of an empty vector");
    for (std::size_t k = 0; k < z.size(); ++k) {
        if (!std::isfinite(z[k])) throw ValidationError("non-finite logit at index " + std::to_string(k));
    }
    const double zmax = *std::max_element(z.begin(), z.end());
    Distribution out;
    out.probs.resize(z.size());
    double total = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
        out.probs[k] = std::exp(z[k] - zmax);
        total += out.probs[k];
    }
    for (double& p : out.probs) p /= total;
    return out;
}

EvidentialWeights split_weights(std::vector<double> w) {
    EvidentialWeights ew;
    ew.w_plus.resize(w.size());
    ew.w_minus.resize(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
        ew.w_plus[k] = std::max(0.0, w[k]);
        ew.w_minus[k] = std::max(0.0, -w[k]);
    }
    ew.w = std::move(w);
    return ew;
}

EvidentialWeights evidential_weights(const CenteredParams& centered, std::span<const double> phi) {
    require_features(centered.beta.cols(), phi);
    std::vector<double> w(centered.beta.rows());
    for (std::size_t k = 0; k < w.size(); ++k) {
        const auto row = centered.beta.row(k);
        w[k] = centered.beta0[k] + std::inner_product(row.begin(), row.end(), phi.begin(), 0.0);
    }
    return split_weights(std::move(w));
}

AlphaParams alpha_params(const CenteredParams& centered, std::span<const double> phi) {
    const std::size_t K = centered.beta.rows();
    const std::size_t J = centered.beta.cols();
    require_features(J, phi);
    const EvidentialWeights ew = evidential_weights(centered, phi);
    const double inv_j = 1.0 / static_cast<double>(J);

    AlphaParams out{Matrix(J, K)};
    for (std::size_t j = 0; j < J; ++j) {
        for (std::size_t k = 0; k < K; ++k) {
            out.alpha(j, k) = inv_j * ew.w[k] - centered.beta(k, j) * phi[j];
        }
    }
    return out;
}

Matrix per_feature_weights(const CenteredParams& centered, std::span<const double> phi) {
    const AlphaParams a = alpha_params(centered, phi);
    const std::size_t K = centered.beta.rows();
    const std::size_t J = centered.beta.cols();
    Matrix out(J, K);
    for (std::size_t j = 0; j < J; ++j) {
        for (std::size_t k = 0; k < K; ++k) {
            out(j, k) = centered.beta(k, j) * phi[j] + a.alpha(j, k);
        }
    }
    return out;
}

double default_tolerance(const EvidentialWeights& ew) {
    double scale = 1.0;
    for (double v : ew.w) scale = std::max(scale, std::abs(v));
    return 1e-12 * scale;
}

SingletonMassReport singleton_mass_signs(const EvidentialWeights& ew, double tol) {
    if (!(tol >= 0.0)) throw ValidationError("tolerance must be nonnegative");
    const std::size_t K = ew.num_classes();

    // Count classes carrying evidence against them; m({z_k}) gets the product
    // term only when every other class does.
    std::size_t num_opposed = 0;
    for (double wm : ew.w_minus) num_opposed += wm > tol ? 1 : 0;

    SingletonMassReport report;
    report.keep_mask.resize(K);
    report.log_scale_w = ew.w;
    report.all_vacuous = true;
    for (std::size_t k = 0; k < K; ++k) {
        const bool self_opposed = ew.w_minus[k] > tol;
        const bool others_all_opposed = num_opposed - (self_opposed ? 1 : 0) == K - 1;
        const bool keep = ew.w_plus[k] > tol || others_all_opposed;
        report.keep_mask[k] = keep;
        if (keep) report.all_vacuous = false;
    }
    return report;
}

std::vector<double> singleton_masses_unnormalized(const EvidentialWeights& ew) {
    const std::size_t K = ew.num_classes();
    for (double v : ew.w) {
        if (!(std::abs(v) <= kMaxExponent)) {
            throw NumericalGuardError("|w| exceeds " + std::to_string(kMaxExponent) +
                                      "; use singleton_mass_signs instead of exact masses");
        }
    }
    std::vector<double> out(K);
    for (std::size_t k = 0; k < K; ++k) {
        double opposed = 1.0;
        for (std::size_t l = 0; l < K; ++l) {
            if (l != k) opposed *= -std::expm1(-ew.w_minus[l]);
        }
        out[k] = std::exp(-ew.w_minus[k]) * (std::expm1(ew.w_plus[k]) + opposed);
    }
    return out;
}

SparseDistribution filter_distribution(const Distribution& softmax_dist,
                                       const SingletonMassReport& report) {
    const std::size_t K = softmax_dist.num_classes();
    if (report.keep_mask.size() != K) {
        throw ValidationError("keep mask has length " + std::to_string(report.keep_mask.size()) +
                              ", distribution has " + std::to_string(K));
    }
    if (report.all_vacuous) {
        SparseDistribution out = to_sparse(softmax_dist);
        out.vacuous_fallback = true;
        return out;
    }

    SparseDistribution out;
    out.num_classes = K;
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        if (report.keep_mask[k] && softmax_dist.probs[k] > 0.0) {
            out.support.push_back(k);
            out.probs.push_back(softmax_dist.probs[k]);
            total += softmax_dist.probs[k];
        }
    }
    if (out.support.empty()) {
        // Every kept class underflowed to zero probability.
        out = to_sparse(softmax_dist);
        out.vacuous_fallback = true;
        return out;
    }
    for (double& p : out.probs) p /= total;
    return out;
}

SparseDistribution sparsify(const LastLayerParams& raw, std::span<const double> phi,
                            std::optional<double> tol) {
    const CenteredParams centered = center_params(raw);
    const EvidentialWeights ew = evidential_weights(centered, phi);
    const double threshold = tol.value_or(default_tolerance(ew));
    return filter_distribution(softmax(logits(raw, phi)), singleton_mass_signs(ew, threshold));
}

SparseDistribution to_sparse(const Distribution& dist) {
    SparseDistribution out;
    out.num_classes = dist.num_classes();
    for (std::size_t k = 0; k < dist.probs.size(); ++k) {
        if (dist.probs[k] > 0.0) {
            out.support.push_back(k);
            out.probs.push_back(dist.probs[k]);
        }
    }
    return out;
}

}  // namespace evsparse::evidential
