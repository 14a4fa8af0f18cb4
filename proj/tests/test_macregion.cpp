#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "misobc/error.hpp"
#include "misobc/fading.hpp"
#include "misobc/macregion.hpp"

using namespace misobc;

namespace {

// log2 det via LU, independent of the library's Cholesky path.
double lu_bound(const ChannelMatrix& h, const PowerVector& q, unsigned mask) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(h.cols(), h.cols());
    for (Eigen::Index k = 0; k < h.rows(); ++k) {
        if (mask & (1u << k)) a += q(k) * h.row(k).adjoint() * h.row(k);
    }
    return std::log2(std::abs(a.determinant()));
}

}  // namespace

TEST_SUITE("macregion") {

TEST_CASE("subset bound examples") {
    ChannelMatrix h1(1, 1);
    h1 << 1.0;
    const std::vector<int> all1 = {0};
    CHECK(subset_bound(h1, PowerVector::Ones(1), all1) == doctest::Approx(1.0).epsilon(1e-14));

    ChannelMatrix h2(2, 2);
    h2 << 1.0, 0.0, 0.0, 1.0;
    const std::vector<int> both = {0, 1};
    CHECK(subset_bound(h2, PowerVector::Ones(2), both) == doctest::Approx(2.0).epsilon(1e-14));

    const auto h = generate(FadingSpec::symmetric(3, 2, 1, 4)).state(0);
    const std::vector<int> some = {0, 2};
    CHECK(subset_bound(h, PowerVector::Zero(3), some) == 0.0);
}

TEST_CASE("subset bound rejects bad input") {
    ChannelMatrix h = ChannelMatrix::Ones(2, 2);
    const std::vector<int> none;
    const std::vector<int> out_of_range = {2};
    CHECK_THROWS_AS(subset_bound(h, PowerVector::Ones(2), none), DimensionError);
    CHECK_THROWS_AS(subset_bound(h, PowerVector::Ones(2), out_of_range), DimensionError);
    CHECK_THROWS_AS(subset_bound(h, PowerVector::Ones(3), std::vector<int>{0}), DimensionError);
    CHECK_THROWS_AS(subset_bound(h, -PowerVector::Ones(2), std::vector<int>{0}), DimensionError);
}

TEST_CASE("corner rates examples") {
    ChannelMatrix h(2, 1);
    h << 1.0, 1.0;
    const auto r12 = corner_rates(h, PowerVector::Ones(2), DecodingOrder({0, 1}));
    CHECK(r12(0) == doctest::Approx(1.0));
    CHECK(r12(1) == doctest::Approx(std::log2(3.0) - 1.0));
    const auto r21 = corner_rates(h, PowerVector::Ones(2), DecodingOrder({1, 0}));
    CHECK(r21(1) == doctest::Approx(1.0));
    CHECK(r21(0) == doctest::Approx(std::log2(3.0) - 1.0));
    CHECK(r12.sum() == doctest::Approx(std::log2(3.0)));
    CHECK(corner_rates(h, PowerVector::Zero(2), DecodingOrder({0, 1})).isZero());
}

TEST_CASE("decoding orders validate permutations") {
    CHECK_THROWS_AS(DecodingOrder({0, 0}), DimensionError);
    CHECK_THROWS_AS(DecodingOrder({1, 2}), DimensionError);
    const DecodingOrder o({2, 0, 1});
    CHECK(o.rank_of(2) == 0);
    CHECK(o.rank_of(1) == 2);
    CHECK(DecodingOrder::identity(3) == DecodingOrder({0, 1, 2}));
}

TEST_CASE("random corners lie in the region and the sum is order invariant") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unif(0.0, 5.0);
    for (int trial = 0; trial < 40; ++trial) {
        const int k = 1 + trial % 6;
        const int m = 1 + trial % 3;
        const auto h = generate(FadingSpec::symmetric(k, m, 1, 1000 + trial)).state(0);
        PowerVector q(k);
        for (int i = 0; i < k; ++i) q(i) = unif(rng);
        std::vector<int> perm(static_cast<std::size_t>(k));
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        const auto r = corner_rates(h, q, DecodingOrder(perm));
        CHECK((r.array() >= 0.0).all());
        CHECK(in_region(h, q, r, 1e-9));
        for (unsigned mask = 1; mask < (1u << k); ++mask) {
            double lhs = 0.0;
            for (int i = 0; i < k; ++i) {
                if (mask & (1u << i)) lhs += r(i);
            }
            CHECK(lhs <= lu_bound(h, q, mask) + 1e-9);
        }
        CHECK(std::abs(r.sum() - sum_bound(h, q)) <= 1e-10);
        CHECK(in_region(h, q, PowerVector::Zero(k), 1e-9));
        if (r.sum() > 1e-6) CHECK_FALSE(in_region(h, q, 1.01 * r, 1e-9));
    }
}

TEST_CASE("subset bounds are monotone in every member's power") {
    const auto h = generate(FadingSpec::symmetric(4, 3, 1, 55)).state(0);
    PowerVector q = PowerVector::Constant(4, 0.7);
    const std::vector<int> subset = {1, 3};
    const double base = subset_bound(h, q, subset);
    for (int k : subset) {
        PowerVector more = q;
        more(k) += 0.5;
        CHECK(subset_bound(h, more, subset) >= base);
    }
}

TEST_CASE("region test refuses too many users") {
    const auto h = generate(FadingSpec::symmetric(21, 1, 1, 3)).state(0);
    CHECK_THROWS_AS(in_region(h, PowerVector::Zero(21), PowerVector::Zero(21), 1e-9), CapacityError);
}

}  // TEST_SUITE
