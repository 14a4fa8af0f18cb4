#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "misobc/baselines.hpp"
#include "misobc/error.hpp"
#include "misobc/fading.hpp"
#include "misobc/scheduler.hpp"

using namespace misobc;

namespace {

ChannelMatrix rows(std::initializer_list<std::initializer_list<Complex>> r) {
    ChannelMatrix h(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& row : r) {
        Eigen::Index j = 0;
        for (const auto& v : row) h(i, j++) = v;
        ++i;
    }
    return h;
}

// Minimum average power over a grid of water levels; the rate at each level is
// monotone, so the smallest level meeting the target is the optimum.
double grid_waterfill(const std::vector<double>& g, const std::vector<double>& p, double r_star) {
    double best = std::numeric_limits<double>::infinity();
    for (double level = 1e-3; level < 50.0; level += 1e-5) {
        double rate = 0.0, power = 0.0;
        for (std::size_t n = 0; n < g.size(); ++n) {
            const double x = std::max(0.0, level - 1.0 / g[n]);
            rate += p[n] * std::log2(1.0 + x * g[n]);
            power += p[n] * x;
        }
        if (rate >= r_star) {
            best = power;
            break;
        }
    }
    return best;
}

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("coherent precoder examples") {
    const auto a = coherent_precoders(rows({{1.0, 0.0}}));
    CHECK(a.gains(0) == doctest::Approx(1.0));
    CHECK(std::abs(a.beams(0, 0) - Complex(1.0, 0.0)) < 1e-12);
    CHECK(coherent_precoders(rows({{3.0, 4.0}})).gains(0) == doctest::Approx(25.0));
    const auto z = coherent_precoders(rows({{0.0, 0.0}}));
    CHECK(z.gains(0) == 0.0);
    CHECK(z.degenerate[0]);
}

TEST_CASE("zero-forcing precoder examples") {
    const auto orth = zf_precoders(rows({{1.0, 0.0}, {0.0, 1.0}}));
    CHECK(orth.gains(0) == doctest::Approx(1.0));
    CHECK(orth.gains(1) == doctest::Approx(1.0));

    const double s = 1.0 / std::sqrt(2.0);
    const auto skew = zf_precoders(rows({{1.0, 0.0}, {s, s}}));
    CHECK(skew.gains(0) == doctest::Approx(0.5));
    CHECK(std::abs(std::abs(skew.beams(0, 0)) - s) < 1e-12);
    CHECK(std::abs(skew.beams(0, 0) + skew.beams(1, 0)) < 1e-12);

    const auto same = zf_precoders(rows({{1.0, 2.0}, {1.0, 2.0}}));
    CHECK(same.gains(0) == 0.0);
    CHECK(same.gains(1) == 0.0);
    CHECK(same.degenerate[0]);
    CHECK(same.degenerate[1]);

    CHECK_THROWS_AS(zf_precoders(ChannelMatrix::Ones(3, 2)), UnsupportedError);
}

TEST_CASE("zero-forcing beams are unit norm and interference free") {
    const auto set = generate(FadingSpec::symmetric(4, 4, 20, 61));
    for (const auto& h : set.states()) {
        const auto p = zf_precoders(h);
        for (int k = 0; k < 4; ++k) {
            CHECK(std::abs(p.beams.col(k).norm() - 1.0) <= 1e-12);
            for (int j = 0; j < 4; ++j) {
                if (j != k) CHECK(std::abs(h.row(j).dot(p.beams.col(k).conjugate())) <= 1e-10);
            }
            CHECK(p.gains(k) == doctest::Approx(std::norm((h.row(k) * p.beams.col(k))(0))));
        }
        const auto c = coherent_precoders(h);
        for (int k = 0; k < 4; ++k) CHECK(std::abs(c.beams.col(k).norm() - 1.0) <= 1e-12);
    }
}

TEST_CASE("water-filling examples") {
    const std::vector<double> g1 = {1.0}, p1 = {1.0};
    CHECK(waterfill_power(g1, p1, 1.0).average_power == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(waterfill_power(g1, p1, 0.0).average_power == 0.0);

    const std::vector<double> zero = {0.0, 0.0}, half = {0.5, 0.5};
    CHECK_THROWS_AS(waterfill_power(zero, half, 1.0), InfeasibleError);
}

TEST_CASE("water-filling matches a water-level grid and beats inversion") {
    const std::vector<double> g = {1.0, 100.0}, p = {0.5, 0.5};
    const auto wf = waterfill_power(g, p, 1.0);
    CHECK(std::abs(wf.average_power - grid_waterfill(g, p, 1.0)) <= 1e-4);
    CHECK(wf.average_power < inversion_power(g, p, 1.0));
    double rate = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) rate += p[n] * std::log2(1.0 + wf.powers[n] * g[n]);
    CHECK(std::abs(rate - 1.0) <= 1e-6);

    const std::vector<double> g3 = {0.2, 0.9, 3.0, 7.5}, p3 = {0.1, 0.4, 0.3, 0.2};
    CHECK(std::abs(waterfill_power(g3, p3, 2.0).average_power - grid_waterfill(g3, p3, 2.0)) <= 1e-4);
}

TEST_CASE("inversion examples") {
    const std::vector<double> g = {1.0, 1.0}, p = {0.5, 0.5};
    CHECK(inversion_power(g, p, 1.0) == doctest::Approx(1.0));
    CHECK(inversion_power(g, p, 1.0, 0.5) == doctest::Approx(1.5));
    const std::vector<double> dead = {1.0, 0.0};
    CHECK_THROWS_AS(inversion_power(dead, p, 1.0), InfeasibleError);
}

TEST_CASE("TDMA and ZF totals on static channels") {
    ChannelSet single({rows({{1.0}})});
    std::vector<UserProfile> dc1 = {{0, TrafficClass::dc, 1.0}};
    CHECK(tdma_power(single, dc1) == doctest::Approx(1.0));

    ChannelSet orth({rows({{1.0, 0.0}, {0.0, 1.0}})});
    std::vector<UserProfile> dc2 = {{0, TrafficClass::dc, 1.0}, {1, TrafficClass::dc, 1.0}};
    CHECK(tdma_power(orth, dc2) == doctest::Approx(3.0));
    CHECK(zf_sdma_power(orth, dc2) == doctest::Approx(2.0));

    ChannelSet wide({ChannelMatrix::Ones(3, 2)});
    std::vector<UserProfile> dc3 = {
        {0, TrafficClass::dc, 1.0}, {1, TrafficClass::dc, 1.0}, {2, TrafficClass::dc, 1.0}};
    CHECK_THROWS_AS(zf_sdma_power(wide, dc3), UnsupportedError);
}

TEST_CASE("the optimal scheduler never needs more power than the baselines") {
    std::vector<UserProfile> profiles = {
        {0, TrafficClass::ndc, 0.5}, {1, TrafficClass::ndc, 0.5}, {2, TrafficClass::dc, 0.5}};
    for (int seed = 0; seed < 3; ++seed) {
        const auto set = generate(FadingSpec::symmetric(3, 3, 6, 900 + seed));
        const auto r = solve_p1_offline(set, profiles, SolverConfig{});
        CHECK(r.allocation.average_power <= tdma_power(set, profiles) + 1e-2);
        CHECK(r.allocation.average_power <= zf_sdma_power(set, profiles) + 1e-2);
    }
}

}  // TEST_SUITE
