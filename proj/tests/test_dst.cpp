#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "evsparse/dst.hpp"
#include "support/oracles.hpp"

using namespace evsparse;
using namespace evsparse::dst;
using evidential::split_weights;
using evsparse::testing::max_abs_diff;

namespace {

PowerSetMass random_mass(std::mt19937_64& rng, std::size_t K) {
    PowerSetMass m(K);
    std::uniform_int_distribution<Subset> subset(1, full_set(K));
    std::uniform_real_distribution<double> u(0.05, 1.0);
    m[full_set(K)] = 0.0;
    const int focal = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < focal; ++i) m[subset(rng)] += u(rng);
    m[full_set(K)] += 0.5;  // keeps conflict well below 1
    const double t = m.total();
    for (Subset a = 1; a < m.size(); ++a) m[a] /= t;
    return m;
}

double max_dev(const PowerSetMass& a, const PowerSetMass& b) {
    return max_abs_diff(a.masses(), b.masses());
}

}  // namespace

TEST_CASE("simple_mass_pair") {
    const auto p = simple_mass_pair(std::log(2.0), 0, 2);
    CHECK(p.positive.focal_set == 0b01);
    CHECK(p.positive.support == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p.negative.is_vacuous());
    const auto pm = p.positive.to_power_set(2);
    CHECK(pm[0b01] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(pm[0b11] == doctest::Approx(0.5).epsilon(1e-15));

    const auto z = simple_mass_pair(0.0, 1, 3);
    CHECK(z.positive.is_vacuous());
    CHECK(z.negative.is_vacuous());

    const auto n = simple_mass_pair(-std::log(4.0), 1, 3);
    CHECK(n.positive.is_vacuous());
    CHECK(n.negative.focal_set == 0b101);
    const auto nm = n.negative.to_power_set(3);
    CHECK(nm[0b101] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(nm[0b111] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("dempster_combine: vacuous mass is neutral") {
    std::mt19937_64 rng(1);
    const auto m = random_mass(rng, 4);
    const auto r = dempster_combine(PowerSetMass(4), m);
    CHECK(r.conflict == 0.0);
    CHECK(max_dev(r.mass, m) <= 1e-15);
    CHECK(max_dev(dempster_combine(m, PowerSetMass(4)).mass, m) <= 1e-15);
}

TEST_CASE("dempster_combine: high-conflict example") {
    // K = 3; a = {z0}, b = {z1}, c = {z2}.
    PowerSetMass m1(3), m2(3);
    m1[0b111] = 0.0;
    m1[0b001] = 0.99;
    m1[0b100] = 0.01;
    m2[0b111] = 0.0;
    m2[0b010] = 0.99;
    m2[0b100] = 0.01;
    const auto r = dempster_combine(m1, m2);
    CHECK(r.conflict == doctest::Approx(0.9999).epsilon(1e-12));
    CHECK(r.mass[0b100] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.mass.total() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dempster_combine reduces to Bayes' rule on singleton masses") {
    std::mt19937_64 rng(2);
    const std::size_t K = 5;
    const auto prior = evsparse::testing::random_probs(rng, K);
    const auto likelihood = evsparse::testing::random_probs(rng, K);
    PowerSetMass m1(K), m2(K);
    m1[full_set(K)] = 0.0;
    m2[full_set(K)] = 0.0;
    double evidence = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        m1[Subset{1} << k] = prior[k];
        m2[Subset{1} << k] = likelihood[k];
        evidence += prior[k] * likelihood[k];
    }
    const auto r = dempster_combine(m1, m2);
    for (std::size_t k = 0; k < K; ++k) {
        CHECK(r.mass[Subset{1} << k] == doctest::Approx(prior[k] * likelihood[k] / evidence).epsilon(1e-12));
    }
    CHECK(r.conflict == doctest::Approx(1.0 - evidence).epsilon(1e-12));

    // A vacuous counterpart leaves the Bayesian mass untouched.
    CHECK(max_dev(dempster_combine(PowerSetMass(K), m1).mass, m1) <= 1e-15);
}

TEST_CASE("dempster_combine rejects total conflict and mismatched frames") {
    PowerSetMass a(2), b(2);
    a[0b11] = 0.0;
    a[0b01] = 1.0;
    b[0b11] = 0.0;
    b[0b10] = 1.0;
    CHECK_THROWS_AS(dempster_combine(a, b), NumericalGuardError);
    CHECK_THROWS_AS(dempster_combine(PowerSetMass(2), PowerSetMass(3)), ValidationError);
    CHECK_THROWS_AS(PowerSetMass(21), ValidationError);
}

TEST_CASE("normalize_checked clamps rounding noise and rejects real damage") {
    PowerSetMass m(2);
    m[0b01] = -1e-16;
    m.normalize_checked();
    CHECK(m[0b01] == 0.0);
    m[0b10] = -1e-3;
    CHECK_THROWS_AS(m.normalize_checked(), NumericalGuardError);
    PowerSetMass big(2);
    big[0b11] = 1.5;
    CHECK_THROWS_AS(big.normalize_checked(), NumericalGuardError);
}

TEST_CASE("Dempster's rule is commutative and associative") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t K = evsparse::testing::uniform_index(rng, 1, 6);
        const auto a = random_mass(rng, K);
        const auto b = random_mass(rng, K);
        const auto c = random_mass(rng, K);
        const auto ab = dempster_combine(a, b);
        const auto ba = dempster_combine(b, a);
        REQUIRE(ab.conflict >= 0.0);
        REQUIRE(ab.conflict < 1.0);
        REQUIRE(max_dev(ab.mass, ba.mass) <= 1e-10);
        const auto left = dempster_combine(ab.mass, c).mass;
        const auto right = dempster_combine(a, dempster_combine(b, c).mass).mass;
        REQUIRE(max_dev(left, right) <= 1e-10);
    }
}

TEST_CASE("fuse_feature_masses") {
    Matrix w(1, 2);
    w(0, 0) = std::log(2.0);
    w(0, 1) = -std::log(2.0);
    const auto fused = fuse_feature_masses(w);
    CHECK(fused[0b01] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(fused[0b10] == 0.0);
    CHECK(fused[0b11] == doctest::Approx(0.25).epsilon(1e-15));

    const auto closed = closed_form_mass(split_weights({std::log(2.0), -std::log(2.0)}));
    CHECK(max_dev(fused, closed.mass) <= 1e-12);

    const auto vac = fuse_feature_masses(Matrix(3, 4, 0.0));
    CHECK(vac[full_set(4)] == 1.0);
    CHECK(vac.total() == 1.0);

    CHECK_THROWS_AS(fuse_feature_masses(Matrix(9, 2)), ValidationError);
    CHECK_THROWS_AS(fuse_feature_masses(Matrix(1, 13)), ValidationError);
}

TEST_CASE("closed_form_mass") {
    const auto v = closed_form_mass(split_weights({0.0, 0.0, 0.0, 0.0}));
    CHECK_FALSE(v.degenerate);
    CHECK(v.mass[full_set(4)] == 1.0);
    CHECK(v.mass.total() == 1.0);

    std::mt19937_64 rng(4);
    std::normal_distribution<double> n(0.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> w(6);
        double mean = 0.0;
        for (double& x : w) mean += (x = n(rng));
        mean /= 6.0;
        for (double& x : w) x -= mean;
        const auto c = closed_form_mass(split_weights(w));
        REQUIRE(std::abs(c.mass.total() - 1.0) <= 1e-10);
        REQUIRE(c.mass[0] == 0.0);
    }

    CHECK_THROWS_AS(closed_form_mass(split_weights({600.0, -600.0})), NumericalGuardError);
}

TEST_CASE("plausibility_transform") {
    const auto u = plausibility_transform(PowerSetMass(4));
    for (double p : u.probs) CHECK(p == 0.25);

    PowerSetMass one(3);
    one[full_set(3)] = 0.0;
    one[0b001] = 1.0;
    CHECK(plausibility_transform(one).probs == std::vector<double>{1.0, 0.0, 0.0});
}

TEST_CASE("fusion, closed form and softmax agree on random layers") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t K = evsparse::testing::uniform_index(rng, 2, 8);
        const std::size_t J = evsparse::testing::uniform_index(rng, 1, 5);
        const auto model = evsparse::testing::random_model(rng, K, J);
        const auto phi = evsparse::testing::random_features(rng, J);
        const auto centered = evidential::center_params(model);
        const auto ew = evidential::evidential_weights(centered, phi);

        const auto closed = closed_form_mass(ew);
        const auto fused = fuse_feature_masses(evidential::per_feature_weights(centered, phi));
        REQUIRE(max_dev(fused, closed.mass) <= 1e-9);

        const auto soft = evidential::softmax(evsparse::testing::naive_logits(model, phi)).probs;
        REQUIRE(max_abs_diff(plausibility_transform(closed.mass).probs, soft) <= 1e-9);
        REQUIRE(max_abs_diff(plausibility_transform(fused).probs, soft) <= 1e-9);
    }
}

TEST_CASE("closed-form singleton masses vanish exactly where the sign test drops the class") {
    const std::vector<std::vector<double>> cases{
        {3, -1, -2}, {2, 2, -4}, {1, -1, 0, 0}, {5, -1, -1, -1, -1, -1}, {1, 1, 1, -1, -1, -1}, {0, 0}};
    for (const auto& w : cases) {
        const auto ew = split_weights(w);
        const auto singles = singleton_masses(closed_form_mass(ew).mass);
        const auto report = evidential::singleton_mass_signs(ew, 0.0);
        for (std::size_t k = 0; k < w.size(); ++k) CHECK(report.keep_mask[k] == (singles[k] > 0.0));
    }
}
