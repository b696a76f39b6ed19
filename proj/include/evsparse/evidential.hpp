#pragma once

// Evidential decomposition of a trained softmax layer and the singleton-mass
// filter built on top of it.
//
// A softmax layer with raw weights B (K x J) and bias b maps features phi to
// logits b + B phi. Centering the parameters over classes gives per-class
// evidential weights w = logits - mean(logits), and the singleton belief
// mass of class k vanishes exactly when w[k] <= 0 (for non-degenerate w).
// Filtering drops those classes and renormalizes the softmax distribution.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evsparse/types.hpp"

namespace evsparse::evidential {

// Raw parameters of the terminal linear layer. weights is class-major (K x J).
struct LastLayerParams {
    Matrix weights;
    std::vector<double> bias;
    std::vector<std::string> class_labels;  // empty or K entries

    std::size_t num_classes() const { return weights.rows(); }
    std::size_t num_features() const { return weights.cols(); }
};

// Throws ValidationError naming the offending entry.
void validate(const LastLayerParams& params);

// Parameters centered over classes: every column of beta and beta0 sums to zero.
struct CenteredParams {
    Matrix beta;
    std::vector<double> beta0;
};

struct EvidentialWeights {
    std::vector<double> w;
    std::vector<double> w_plus;
    std::vector<double> w_minus;

    std::size_t num_classes() const { return w.size(); }
};

// Per-feature bias terms alpha[j][k], J x K. Input dependent.
struct AlphaParams {
    Matrix alpha;
};

struct SingletonMassReport {
    std::vector<bool> keep_mask;
    std::vector<double> log_scale_w;
    bool all_vacuous = false;
};

// Largest |w| accepted by the paths that exponentiate evidential weights.
inline constexpr double kMaxExponent = 500.0;

CenteredParams center_params(const LastLayerParams& raw);

std::vector<double> logits(const LastLayerParams& raw, std::span<const double> phi);

// Max-subtracted softmax. Throws ValidationError on non-finite input.
Distribution softmax(std::span<const double> logits);

EvidentialWeights evidential_weights(const CenteredParams& centered, std::span<const double> phi);

// Splits a weight vector into its positive and negative parts.
EvidentialWeights split_weights(std::vector<double> w);

AlphaParams alpha_params(const CenteredParams& centered, std::span<const double> phi);

/// Per-feature evidential weights w_jk = beta[k][j] * phi[j] + alpha[j][k]
/// as a J x K matrix. Each column is constant and equal to w[k] / J.
Matrix per_feature_weights(const CenteredParams& centered, std::span<const double> phi);

// 1e-12 * max(1, max|w|).
double default_tolerance(const EvidentialWeights& ew);

/// Decides which singleton masses are strictly positive from the signs of
/// the evidential weights alone; never exponentiates.
SingletonMassReport singleton_mass_signs(const EvidentialWeights& ew, double tol);

/// Singleton masses without the shared normalization constant.
/// Throws NumericalGuardError when max|w| exceeds kMaxExponent.
std::vector<double> singleton_masses_unnormalized(const EvidentialWeights& ew);

/// Keeps the classes flagged in the report and renormalizes. When every
/// singleton mass is zero the input distribution is returned unchanged with
/// vacuous_fallback set.
SparseDistribution filter_distribution(const Distribution& softmax_dist,
                                       const SingletonMassReport& report);

// End-to-end filter. Without tol, default_tolerance(w) is used.
SparseDistribution sparsify(const LastLayerParams& raw, std::span<const double> phi,
                            std::optional<double> tol = std::nullopt);

// Wraps a dense distribution as a full-support SparseDistribution (zero
// entries are dropped from the support).
SparseDistribution to_sparse(const Distribution& dist);

}  // namespace evsparse::evidential
