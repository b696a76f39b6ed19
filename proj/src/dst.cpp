#include "evsparse/dst.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace evsparse::dst {

namespace {

constexpr double kTotalConflict = 1.0 - 1e-12;

Subset singleton(std::size_t k) { return Subset{1} << k; }

}  // namespace

PowerSetMass::PowerSetMass(std::size_t num_classes) : num_classes_(num_classes) {
    if (num_classes == 0 || num_classes > kMaxPowerSetClasses) {
        throw ValidationError("power-set mass supports 1.." + std::to_string(kMaxPowerSetClasses) +
                              " classes, got " + std::to_string(num_classes));
    }
    masses_.assign(std::size_t{1} << num_classes, 0.0);
    masses_[full_set(num_classes)] = 1.0;
}

double PowerSetMass::total() const {
    double t = 0.0;
    for (double m : masses_) t += m;
    return t;
}

void PowerSetMass::normalize_checked() {
    masses_[0] = 0.0;
    for (double& m : masses_) {
        if (m < -1e-15) throw NumericalGuardError("negative mass " + std::to_string(m));
        if (m < 0.0) m = 0.0;
    }
    const double t = total();
    if (!(std::abs(t - 1.0) < 1e-10)) {
        throw NumericalGuardError("mass total " + std::to_string(t) + " deviates from 1");
    }
    for (double& m : masses_) m /= t;
}

PowerSetMass SimpleMass::to_power_set(std::size_t num_classes) const {
    PowerSetMass m(num_classes);
    const Subset z = full_set(num_classes);
    if (focal_set != z) {
        m[focal_set] += support;
        m[z] -= support;
    }
    return m;
}

SimpleMassPair simple_mass_pair(double w_jk, std::size_t class_k, std::size_t num_classes) {
    if (!std::isfinite(w_jk)) throw ValidationError("non-finite evidential weight");
    if (class_k >= num_classes) throw ValidationError("class index out of range");
    const Subset k = singleton(class_k);
    SimpleMassPair pair;
    pair.positive = {k, -std::expm1(-std::max(0.0, w_jk))};
    pair.negative = {full_set(num_classes) & ~k, -std::expm1(-std::max(0.0, -w_jk))};
    return pair;
}

Combination dempster_combine(const PowerSetMass& m1, const PowerSetMass& m2) {
    if (m1.num_classes() != m2.num_classes()) {
        throw ValidationError("cannot combine masses over frames of different size");
    }
    std::vector<std::pair<Subset, double>> focal2;
    for (Subset c = 1; c < m2.size(); ++c) {
        if (m2[c] != 0.0) focal2.emplace_back(c, m2[c]);
    }

    Combination out{PowerSetMass(m1.num_classes()), 0.0};
    PowerSetMass& fused = out.mass;
    fused[full_set(m1.num_classes())] = 0.0;
    double conflict = 0.0;
    for (Subset b = 1; b < m1.size(); ++b) {
        const double mb = m1[b];
        if (mb == 0.0) continue;
        for (const auto& [c, mc] : focal2) {
            const Subset a = b & c;
            if (a == 0) {
                conflict += mb * mc;
            } else {
                fused[a] += mb * mc;
            }
        }
    }
    if (!(conflict < kTotalConflict)) {
        throw NumericalGuardError("total conflict: kappa = " + std::to_string(conflict));
    }
    const double scale = 1.0 / (1.0 - conflict);
    for (Subset a = 1; a < fused.size(); ++a) fused[a] *= scale;
    fused.normalize_checked();
    out.conflict = conflict;
    return out;
}

PowerSetMass fuse_feature_masses(const Matrix& w) {
    const std::size_t J = w.rows();
    const std::size_t K = w.cols();
    if (K < 1 || K > kMaxFusionClasses || J < 1 || J > kMaxFusionFeatures) {
        throw ValidationError("fusion budget is K <= " + std::to_string(kMaxFusionClasses) +
                              ", J <= " + std::to_string(kMaxFusionFeatures) + "; got K = " +
                              std::to_string(K) + ", J = " + std::to_string(J));
    }
    PowerSetMass fused(K);
    for (std::size_t j = 0; j < J; ++j) {
        for (std::size_t k = 0; k < K; ++k) {
            const SimpleMassPair pair = simple_mass_pair(w(j, k), k, K);
            for (const SimpleMass& s : {pair.positive, pair.negative}) {
                if (s.is_vacuous()) continue;
                fused = dempster_combine(fused, s.to_power_set(K)).mass;
            }
        }
    }
    return fused;
}

ClosedFormMass closed_form_mass(const evidential::EvidentialWeights& ew) {
    const std::size_t K = ew.num_classes();
    for (double v : ew.w) {
        if (!(std::abs(v) <= evidential::kMaxExponent)) {
            throw NumericalGuardError("|w| exceeds " + std::to_string(evidential::kMaxExponent));
        }
    }
    ClosedFormMass out{PowerSetMass(K), false};
    PowerSetMass& m = out.mass;

    std::vector<double> kept(K);     // e^{-w_k^-}
    std::vector<double> opposed(K);  // 1 - e^{-w_k^-}
    for (std::size_t k = 0; k < K; ++k) {
        kept[k] = std::exp(-ew.w_minus[k]);
        opposed[k] = -std::expm1(-ew.w_minus[k]);
    }

    for (Subset a = 1; a < m.size(); ++a) {
        if (std::has_single_bit(a)) {
            const auto k = static_cast<std::size_t>(std::countr_zero(a));
            double others = 1.0;
            for (std::size_t l = 0; l < K; ++l) {
                if (l != k) others *= opposed[l];
            }
            m[a] = kept[k] * (std::expm1(ew.w_plus[k]) + others);
        } else {
            double v = 1.0;
            for (std::size_t k = 0; k < K; ++k) v *= (a & singleton(k)) ? kept[k] : opposed[k];
            m[a] = v;
        }
    }

    const double total = m.total();
    if (!(total > 0.0) || !std::isfinite(total)) {
        out.mass = PowerSetMass(K);
        out.degenerate = true;
        return out;
    }
    for (Subset a = 1; a < m.size(); ++a) m[a] /= total;
    return out;
}

std::vector<double> plausibility(const PowerSetMass& m) {
    std::vector<double> pl(m.num_classes(), 0.0);
    for (Subset b = 1; b < m.size(); ++b) {
        if (m[b] == 0.0) continue;
        for (std::size_t k = 0; k < pl.size(); ++k) {
            if (b & singleton(k)) pl[k] += m[b];
        }
    }
    return pl;
}

Distribution plausibility_transform(const PowerSetMass& m) {
    Distribution out{plausibility(m)};
    double total = 0.0;
    for (double p : out.probs) total += p;
    for (double& p : out.probs) p /= total;
    return out;
}

std::vector<double> singleton_masses(const PowerSetMass& m) {
    std::vector<double> out(m.num_classes());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = m[singleton(k)];
    return out;
}

}  // namespace evsparse::dst
