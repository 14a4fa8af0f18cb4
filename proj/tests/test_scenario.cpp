#include <doctest.h>

#include "misobc/error.hpp"
#include "misobc/scenario.hpp"

using namespace misobc;

TEST_SUITE("scenario") {

TEST_CASE("mixed-traffic split") {
    const auto p = mixed_profiles(4, 0.25, 6.0);
    REQUIRE(p.size() == 4);
    CHECK(p[0].traffic == TrafficClass::ndc);
    CHECK(p[1].traffic == TrafficClass::ndc);
    CHECK(p[2].traffic == TrafficClass::dc);
    CHECK(p[0].target_rate == doctest::Approx(0.75));
    CHECK(p[3].target_rate == doctest::Approx(2.25));

    const auto odd = mixed_profiles(3, 0.5, 3.0);
    CHECK(odd[1].traffic == TrafficClass::ndc);
    CHECK(odd[2].traffic == TrafficClass::dc);
    CHECK(odd[2].target_rate == doctest::Approx(1.5));
    CHECK_THROWS_AS(mixed_profiles(4, 1.5, 1.0), ConfigError);
}

TEST_CASE("minimal config gets defaults") {
    const auto s = parse_scenario(R"({"fading": {"users": 2, "antennas": 3}})");
    CHECK(s.fading.users == 2);
    CHECK(s.fading.antennas == 3);
    CHECK(s.fading.states == 100);
    CHECK(s.fading.variances == std::vector<double>{1.0, 1.0});
    CHECK(s.blocks == 3000);
    CHECK(s.solver.step_rule == StepRule::cutting_plane);
    CHECK(s.profiles.empty());
    CHECK(s.rate_profile().isApprox(Eigen::Vector2d(0.5, 0.5)));
}

TEST_CASE("full config parses every section") {
    const auto s = parse_scenario(R"({
        "name": "demo",
        "fading": {"users": 2, "antennas": 2, "states": 7, "seed": 9, "variances": [2.0, 0.5]},
        "profiles": [{"user": 1, "class": "DC", "target": 1.0}, {"user": 0, "class": "ndc", "target": 3.0}],
        "p_star": 10,
        "blocks": 50,
        "solver": {"step_mu": 0.05, "step_rule": "adaptive", "gap_tol": 1e-3, "p3": {"kkt_tol": 1e-7}},
        "throughput": {"tol": 0.01},
        "output_path": "out.csv"
    })");
    CHECK(s.name == "demo");
    CHECK(s.fading.seed == 9);
    CHECK(s.profiles.size() == 2);
    CHECK(s.profiles[0].traffic == TrafficClass::dc);
    CHECK(*s.p_star == 10.0);
    CHECK(s.blocks == 50);
    CHECK(s.solver.step_mu == 0.05);
    CHECK(s.solver.step_rule == StepRule::adaptive);
    CHECK(s.solver.p3.kkt_tol == 1e-7);
    CHECK(s.throughput.tol == 0.01);
    CHECK(s.output_path == "out.csv");
    // Profile targets normalized by user index.
    CHECK(s.rate_profile().isApprox(Eigen::Vector2d(0.75, 0.25)));
}

TEST_CASE("invalid configs raise ConfigError") {
    CHECK_THROWS_AS(parse_scenario("not json"), ConfigError);
    CHECK_THROWS_AS(parse_scenario(R"({"name": "x"})"), ConfigError);
    CHECK_THROWS_AS(parse_scenario(R"({"fading": {"users": 2, "antennas": 2}, "gamma": 1.5})"), ConfigError);
    CHECK_THROWS_AS(parse_scenario(R"({"fading": {"users": 0, "antennas": 2}})"), ConfigError);
    CHECK_THROWS_AS(parse_scenario(R"({"fading": {"users": 2, "antennas": 2}, "solver": {"eps": 2}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_scenario(R"({"fading": {"users": 1, "antennas": 1},
        "profiles": [{"user": 0, "class": "bursty", "target": 1}]})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_scenario(R"({"fading": {"users": 2, "antennas": 2},
        "profiles": [{"user": 0, "class": "ndc", "target": 1}]})"),
                    ConfigError);
    CHECK_THROWS_AS(load_scenario("/nonexistent/config.json"), IoError);
}

TEST_CASE("JSON round trip") {
    auto s = parse_scenario(R"({"fading": {"users": 4, "antennas": 4, "states": 10, "seed": 7},
                               "gamma": 0.5, "sum_rate": 2.0, "alpha": [0.25, 0.25, 0.25, 0.25]})");
    s.solver.columns = 77;
    const auto back = parse_scenario(scenario_to_json(s));
    CHECK(back.fading.seed == 7);
    CHECK(back.fading.states == 10);
    CHECK(*back.gamma == 0.5);
    CHECK(back.profiles.size() == 4);
    CHECK(back.profiles[3].target_rate == doctest::Approx(s.profiles[3].target_rate));
    CHECK(back.solver.columns == 77);
    CHECK(back.alpha->isApprox(*s.alpha));
    CHECK(scenario_to_json(back) == scenario_to_json(s));
}

}  // TEST_SUITE
