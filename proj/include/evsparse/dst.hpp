#pragma once

// Brute-force Dempster-Shafer machinery over the full power set of a small
// class set. Subsets are bitmasks: bit k set means class k is in the subset.
// This is validation code; the production filter never builds a power set.

#include <cstdint>
#include <utility>
#include <vector>

#include "evsparse/evidential.hpp"
#include "evsparse/types.hpp"

namespace evsparse::dst {

using Subset = std::uint32_t;

inline constexpr std::size_t kMaxPowerSetClasses = 20;
inline constexpr std::size_t kMaxFusionClasses = 12;
inline constexpr std::size_t kMaxFusionFeatures = 8;

inline Subset full_set(std::size_t num_classes) {
    return static_cast<Subset>((std::uint64_t{1} << num_classes) - 1);
}

// Belief mass over all 2^K subsets, indexed by bitmask.
class PowerSetMass {
public:
    // Vacuous mass: m(Z) = 1.
    explicit PowerSetMass(std::size_t num_classes);

    std::size_t num_classes() const { return num_classes_; }
    std::size_t size() const { return masses_.size(); }

    double operator[](Subset a) const { return masses_[a]; }
    double& operator[](Subset a) { return masses_[a]; }

    const std::vector<double>& masses() const { return masses_; }

    double total() const;

    // Clamps entries within -1e-15 of zero (and the empty set) to 0 and
    // rescales to unit total. Throws NumericalGuardError if a more negative
    // entry is present or the total is off by 1e-10 or more.
    void normalize_checked();

private:
    std::size_t num_classes_;
    std::vector<double> masses_;
};

struct SimpleMass {
    Subset focal_set = 0;
    double support = 0.0;

    bool is_vacuous() const { return support == 0.0; }
    PowerSetMass to_power_set(std::size_t num_classes) const;
};

struct SimpleMassPair {
    SimpleMass positive;  // focal set {z_k}
    SimpleMass negative;  // focal set Z \ {z_k}
};

struct Combination {
    PowerSetMass mass;
    double conflict;
};

struct ClosedFormMass {
    PowerSetMass mass;
    bool degenerate = false;  // could not be normalized; mass is vacuous
};

SimpleMassPair simple_mass_pair(double w_jk, std::size_t class_k, std::size_t num_classes);

/// Dempster's rule. Throws NumericalGuardError on (near) total conflict and
/// ValidationError on mismatched frames.
Combination dempster_combine(const PowerSetMass& m1, const PowerSetMass& m2);

/// Left fold of Dempster's rule over every simple mass induced by a J x K
/// matrix of per-feature weights, in feature-major, class, positive-first order.
PowerSetMass fuse_feature_masses(const Matrix& per_feature_weights);

// Output mass in closed form, normalized over the non-empty subsets.
ClosedFormMass closed_form_mass(const evidential::EvidentialWeights& ew);

// Unnormalized plausibility of each singleton.
std::vector<double> plausibility(const PowerSetMass& m);

Distribution plausibility_transform(const PowerSetMass& m);

// Belief committed exactly to {z_k} for each k.
std::vector<double> singleton_masses(const PowerSetMass& m);

}  // namespace evsparse::dst
