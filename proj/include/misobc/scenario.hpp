#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "misobc/fading.hpp"
#include "misobc/scheduler.hpp"
#include "misobc/throughput.hpp"

namespace misobc {

// One experiment setup, read from a JSON file with the sections
//   name, fading, profiles, gamma, sum_rate, p_star, alpha, blocks, solver,
//   throughput, output_path.
// Only "fading" is required. When "profiles" is absent but gamma and sum_rate
// are given, the mixed-traffic split is used: the first half of the users
// (rounded up) are NDC sharing gamma * sum_rate equally, the rest DC sharing
// the remainder.
struct Scenario {
    std::string name = "scenario";
    FadingSpec fading;
    std::vector<UserProfile> profiles;
    std::optional<double> gamma;
    std::optional<double> sum_rate;
    std::optional<double> p_star;
    std::optional<RateProfile> alpha;
    int blocks = 3000;  // online horizon
    SolverConfig solver;
    ThroughputConfig throughput;
    std::string output_path;

    void validate() const;

    // Explicit alpha, else the normalized profile targets, else uniform.
    RateProfile rate_profile() const;
};

std::vector<UserProfile> mixed_profiles(int users, double gamma, double sum_rate);

// Throw ConfigError on malformed input, IoError when the file is unreadable.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);
std::string scenario_to_json(const Scenario& scenario);

}  // namespace misobc
