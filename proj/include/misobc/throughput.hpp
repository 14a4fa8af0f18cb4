#pragma once

#include <optional>
#include <string>
#include <vector>

#include "misobc/fading.hpp"
#include "misobc/scheduler.hpp"

namespace misobc {

// Per-user shares of the sum rate; nonnegative, summing to 1.
using RateProfile = Eigen::VectorXd;

void validate_profile(const RateProfile& alpha);

// Every user of a throughput problem belongs to one traffic class.
enum class ThroughputMode { expected, delay_limited };

// Minimum average power with targets r_sum * alpha_k, all users NDC
// (expected) or all DC (delay_limited). `warm` seeds and receives the
// multipliers of the solve. Throws InfeasibleError in delay-limited mode when
// some state cannot carry the targets under the power cap.
OfflineResult solve_profile(const ChannelSet& channels, const RateProfile& alpha, double r_sum,
                            ThroughputMode mode, const SolverConfig& config, DualState* warm = nullptr);

double min_power_for_profile(const ChannelSet& channels, const RateProfile& alpha, double r_sum,
                             ThroughputMode mode, const SolverConfig& config);

struct ThroughputConfig {
    double tol = 1e-3;        // final bracket width on the sum rate
    double initial = 1.0;     // first upper bracket, doubled until infeasible
    double max_rate = 1e3;    // give up growing the bracket beyond this
};

// Largest r_sum whose minimum power does not exceed p_star (lower end of the
// final bracket).
double throughput(const ChannelSet& channels, const RateProfile& alpha, double p_star, ThroughputMode mode,
                  const SolverConfig& config, const ThroughputConfig& tconfig = {});

struct SumCapacity {
    double value = 0.0;   // expected sum rate at the optimal allocation
    RateProfile alpha;    // realized shares of the sum rate
    double price = 0.0;   // power price at which the average power equals p_star
};

// Maximizes the expected sum rate under average power p_star: equal weights in
// every state and a common power price bisected to spend p_star on average.
// Individual rates on the dominant face are averaged over the K cyclic
// rotations of the decoding order.
SumCapacity sum_capacity_profile(const ChannelSet& channels, double p_star, const P3Config& config = {});

double fairness_penalty(const ChannelSet& channels, const RateProfile& alpha_e, double p_star,
                        const SolverConfig& config, const ThroughputConfig& tconfig = {});

// K log2(1 + p_star / (K rho)), the delay-limited throughput bound.
double theorem_bound(double p_star, int users, double rho);

struct ThroughputReport {
    double p_star = 0.0;
    RateProfile alpha;
    double c_e = 0.0;
    double c_d = 0.0;
    double delay_penalty = 0.0;
    std::optional<double> sum_capacity;
    std::optional<double> fairness_penalty;
    std::optional<double> theorem_bound;
};

ThroughputReport delay_penalty(const ChannelSet& channels, const RateProfile& alpha, double p_star,
                               const SolverConfig& config, const ThroughputConfig& tconfig = {});

// CSV with columns p_star,alpha,C_e,C_d,delay_penalty,fairness_penalty,theorem_bound;
// alpha is semicolon-joined and absent optional values are empty.
std::string report_csv_header();
std::string report_csv_row(const ThroughputReport& report);

}  // namespace misobc
