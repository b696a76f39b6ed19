#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "evsparse/metrics.hpp"
#include "support/oracles.hpp"

using namespace evsparse;
using namespace evsparse::metrics;
using evsparse::testing::max_abs_diff;

namespace {

const Distribution kEven{{0.07175066, 0.18762952, 0.12967074, 0.14694512, 0.10367352, 0.02215276, 0.05927196,
                          0.05245687, 0.04584087, 0.18060793}};
const Distribution kOdd{{0.11829948, 0.0170686, 0.06552684, 0.01989201, 0.16146706, 0.16441198, 0.2041005,
                         0.13485213, 0.09432564, 0.02005576}};

}  // namespace

TEST_CASE("target_distribution on the even/odd pair") {
    const auto t = target_distribution(kEven, kOdd);
    CHECK(t.support == std::vector<std::size_t>{1, 2, 3, 9});
    // Renormalized over 0.64485331.
    CHECK(max_abs_diff(t.probs, {0.290963, 0.201086, 0.227874, 0.280077}) <= 1e-4);
}

TEST_CASE("target_distribution edge cases") {
    const auto same = target_distribution(kEven, kEven);
    CHECK(same.support.size() == 10);
    // The published vector sums to 1 only to about 1e-8.
    const double total = std::accumulate(kEven.probs.begin(), kEven.probs.end(), 0.0);
    for (std::size_t k = 0; k < 10; ++k) CHECK(same.probs[k] == doctest::Approx(kEven.probs[k] / total).epsilon(1e-14));

    const Distribution onehot{{0.0, 0.0, 1.0, 0.0}};
    const Distribution uniform{{0.25, 0.25, 0.25, 0.25}};
    const auto t = target_distribution(onehot, uniform);
    CHECK(t.support == std::vector<std::size_t>{2});
    CHECK(t.probs == std::vector<double>{1.0});

    CHECK_THROWS_AS(target_distribution(onehot, kEven), ValidationError);
}

TEST_CASE("target_distribution is idempotent on its own support") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t K = evsparse::testing::uniform_index(rng, 2, 12);
        const Distribution p{evsparse::testing::random_probs(rng, K)};
        const Distribution q{evsparse::testing::random_probs(rng, K)};
        const auto t = target_distribution(p, q);
        const Distribution restricted{t.dense()};
        const auto again = target_distribution(restricted, q);
        REQUIRE(again.support == t.support);
        REQUIRE(max_abs_diff(again.probs, t.probs) <= 1e-12);
    }
}

TEST_CASE("bhattacharyya") {
    const std::vector<double> p{0.2, 0.3, 0.5};
    CHECK(bhattacharyya(p, p) <= 1e-12);
    CHECK(bhattacharyya(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0}) ==
          std::numeric_limits<double>::infinity());
    CHECK(bhattacharyya(std::vector<double>{0.5, 0.5}, std::vector<double>{1.0, 0.0}) ==
          doctest::Approx(0.3465735902799726).epsilon(1e-12));
    const double smoothed = bhattacharyya(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0}, 1e-3);
    CHECK(std::isfinite(smoothed));
    CHECK(smoothed > 0.0);
}

TEST_CASE("wasserstein1") {
    const std::vector<double> a{1.0, 0.0, 0.0, 0.0};
    const std::vector<double> b{0.0, 0.0, 0.0, 1.0};
    CHECK(wasserstein1(a, b) == 3.0);
    CHECK(wasserstein1(a, a) == 0.0);
    CHECK_THROWS_AS(wasserstein1(a, std::vector<double>{1.0}), ValidationError);

    std::mt19937_64 rng(12);
    const auto p = evsparse::testing::random_probs(rng, 5);
    const auto q = evsparse::testing::random_probs(rng, 5);
    CHECK(std::abs(wasserstein1(p, q) - evsparse::testing::transport_oracle(p, q)) <= 1e-9);
}

TEST_CASE("distance axioms on random triples") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t K = evsparse::testing::uniform_index(rng, 2, 10);
        const auto p = evsparse::testing::random_probs(rng, K);
        const auto q = evsparse::testing::random_probs(rng, K);
        const auto r = evsparse::testing::random_probs(rng, K);
        REQUIRE(std::abs(wasserstein1(p, q) - wasserstein1(q, p)) <= 1e-12);
        REQUIRE(std::abs(bhattacharyya(p, q) - bhattacharyya(q, p)) <= 1e-12);
        REQUIRE(wasserstein1(p, q) > 0.0);
        REQUIRE(bhattacharyya(p, q) > 0.0);
        REQUIRE(wasserstein1(p, p) <= 1e-12);
        REQUIRE(bhattacharyya(p, p) <= 1e-12);
        REQUIRE(wasserstein1(p, r) <= wasserstein1(p, q) + wasserstein1(q, r) + 1e-10);
    }
}

TEST_CASE("support_stats") {
    SparseDistribution half{10, {0, 1, 2, 3, 4}, {0.2, 0.2, 0.2, 0.2, 0.2}, false};
    CHECK(support_stats(half).size == 5);
    CHECK(support_stats(half).reduction_fraction == 0.5);

    SparseDistribution full{3, {0, 1, 2}, {0.2, 0.3, 0.5}, false};
    CHECK(support_stats(full).size == 3);
    CHECK(support_stats(full).reduction_fraction == 0.0);

    SparseDistribution two{25, {3, 17}, {0.5, 0.5}, false};
    CHECK(support_stats(two).size == 2);
    CHECK(support_stats(two).reduction_fraction == doctest::Approx(0.92).epsilon(1e-15));
}

TEST_CASE("sparse overloads read missing classes as zero") {
    SparseDistribution a{4, {0}, {1.0}, false};
    SparseDistribution b{4, {3}, {1.0}, false};
    CHECK(wasserstein1(a, b) == 3.0);
    CHECK(bhattacharyya(a, b) == std::numeric_limits<double>::infinity());
}
