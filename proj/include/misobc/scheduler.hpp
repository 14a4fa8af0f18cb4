#pragma once

#include <span>
#include <vector>

#include "misobc/error.hpp"
#include "misobc/fading.hpp"
#include "misobc/types.hpp"
#include "misobc/wsolver.hpp"

namespace misobc {

// NDC: average-rate target over fading states. DC: the same rate in every state.
enum class TrafficClass { ndc, dc };

struct UserProfile {
    int user_id = 0;
    TrafficClass traffic = TrafficClass::ndc;
    double target_rate = 0.0;  // R_k*, bits per complex dimension
};

// constant: the plain projected step {x + step * residual}^+.
// adaptive: same direction, but each coordinate's step grows by 1.5x while the
// residual keeps its sign and halves when it flips.
// cutting_plane: the next multipliers maximize the piecewise-linear model of
// the dual function built from all evaluated iterates, inside a trust box.
enum class StepRule { constant, adaptive, cutting_plane };

struct SolverConfig {
    double step_mu = 0.01;
    double step_delta = 0.01;
    StepRule step_rule = StepRule::cutting_plane;
    double max_step = 1e4;      // cap on an adapted step
    double radius = 1.0;        // initial trust box half-width (cutting_plane)
    double eps = 0.01;          // online rate-averaging factor
    double rate_tol = 1e-2;     // reporting tolerance on rate targets
    double dc_tol = 1e-6;       // per-state DC shortfall accepted by the inner loop
    double ndc_tol = 1e-6;      // average-rate shortfall accepted by the outer loop
    double gap_tol = 1e-4;      // relative duality gap that ends the outer loop
    double inner_gap_tol = 1e-8;
    int max_outer = 1000;
    int max_inner = 400;
    int columns = 200;          // iterates kept for primal recovery
    double power_cap = 1e6;     // per-state power above which DC targets count as infeasible
    double mu_init = 1.0;
    double delta_init = 1.0;
    P3Config p3 = {.obj_tol = 1e-12, .kkt_tol = 1e-8, .q_tol = 1e-12, .bisect_tol = 1e-13,
                   .root_tol = 1e-11, .max_sweeps = 2000, .record_steps = false};

    void validate() const;
};

// Checks that profiles cover users 0..K-1 exactly once with nonnegative
// targets; returns them indexed by user.
std::vector<UserProfile> indexed_profiles(std::span<const UserProfile> profiles, int users);

// Projected subgradient steps {x + step (target - achieved)}^+, componentwise.
Eigen::VectorXd mu_update(const Eigen::VectorXd& mu, const Eigen::VectorXd& targets,
                          const Eigen::VectorXd& avg_rates, double step);
Eigen::VectorXd delta_update(const Eigen::VectorXd& delta, const Eigen::VectorXd& targets,
                             const Eigen::VectorXd& rates, double step);

// R <- (1 - eps) R + eps r.
Eigen::VectorXd rate_average(const Eigen::VectorXd& rbar, const Eigen::VectorXd& rates, double eps);

// Per-coordinate step sizes for the projected subgradient updates.
class StepController {
public:
    StepController(Eigen::Index size, double initial, StepRule rule, double max_step);
    // Projected step of x along residual; adapts the step sizes afterwards.
    Eigen::VectorXd advance(const Eigen::VectorXd& x, const Eigen::VectorXd& residual);
    const Eigen::VectorXd& steps() const { return step_; }

private:
    Eigen::VectorXd step_;
    Eigen::VectorXd last_sign_;
    StepRule rule_;
    double max_step_;
};

// Single fading state: minimize sum q - sum_{NDC} mu_k R_k subject to the DC
// targets, by running the weighted solver and the DC multiplier update until
// the DC targets are met. Near-tied weights can make the exact optimum a
// time-sharing of decoding orders; the recorded iterates are then combined.
struct P2Result {
    PowerVector q;
    RateVector rates;
    DecodingOrder order;        // order of the dominant iterate
    Eigen::VectorXd delta;      // DC multipliers (0 for NDC users)
    double lagrangian = 0.0;    // sum q - sum_{NDC} mu_k R_k at the returned point
    double dual_bound = 0.0;    // lower bound on the optimal value of that quantity
    int iterations = 0;
    bool time_shared = false;
    SolveStatus status = SolveStatus::converged;
};

// mu holds one entry per user; entries of DC users are ignored. Throws
// InfeasibleError when a DC user with a positive target has a zero channel or
// the power cap is exceeded.
P2Result solve_p2(const ChannelMatrix& h, std::span<const UserProfile> profiles, const Eigen::VectorXd& mu,
                  const SolverConfig& config, const Eigen::VectorXd* warm_delta = nullptr,
                  const PowerVector* warm_q = nullptr);

struct Allocation {
    std::vector<PowerVector> q;          // per state
    std::vector<RateVector> rates;       // per state
    std::vector<DecodingOrder> order;    // per state
    double average_power = 0.0;
    Eigen::VectorXd average_rates;
};

struct DualState {
    Eigen::VectorXd mu;                  // per user; 0 for DC users
    std::vector<Eigen::VectorXd> delta;  // per state, per user; 0 for NDC users
};

struct OfflineTraceRow {
    int iter = 0;
    int user = 0;
    double mu = 0.0;
    double avg_rate = 0.0;
    double power = 0.0;
};

struct OfflineResult {
    Allocation allocation;
    DualState dual;
    std::vector<OfflineTraceRow> trace;
    double dual_bound = 0.0;   // best dual function value seen
    double duality_gap = 0.0;  // allocation.average_power - dual_bound
    int iterations = 0;
    SolveStatus status = SolveStatus::converged;
};

// Minimum average power meeting every user's target over the ensemble
// (two-layer dual method). `warm` seeds the multipliers.
OfflineResult solve_p1_offline(const ChannelSet& channels, std::span<const UserProfile> profiles,
                               const SolverConfig& config, const DualState* warm = nullptr);

// Dual function value at mu (NDC entries) together with the expected rates of
// the inner minimizers. Exact when every user is NDC; with DC users the inner
// problems are solved to the configured gap and the value is a lower bound.
struct DualEvaluation {
    double value = 0.0;
    Eigen::VectorXd avg_rates;
};
DualEvaluation evaluate_dual(const ChannelSet& channels, std::span<const UserProfile> profiles,
                             const Eigen::VectorXd& mu, const SolverConfig& config);

// Checks g(theta) <= g(mu) + sum_k (theta_k - mu_k)(R_k* - E[R'_k]) within tol,
// with E[R'] the expected rates of the inner minimizer at mu.
bool subgradient_certificate(const Eigen::VectorXd& theta, const Eigen::VectorXd& mu, double g_theta,
                             double g_mu, const Eigen::VectorXd& avg_rates_at_mu,
                             const Eigen::VectorXd& targets, double tol = 1e-9);

// Online scheduler state: multipliers and exponentially averaged rates.
struct OnlineState {
    Eigen::VectorXd mu;
    Eigen::VectorXd rbar;
    int t = 0;
};

OnlineState online_init(std::span<const UserProfile> profiles, const SolverConfig& config);

struct OnlineStep {
    RateVector rates;
    PowerVector q;
    SolveStatus inner_status = SolveStatus::converged;
};

// One transmission block: update mu from the running average of past rates
// (constant step config.step_mu), run the DC loop on this block's channel,
// transmit, then fold the transmitted rates into the average.
OnlineStep online_step(const ChannelMatrix& h, std::span<const UserProfile> profiles, OnlineState& state,
                       const SolverConfig& config);

struct PfsState {
    Eigen::VectorXd rbar;
    int t = 0;
};

// Weighted sum-rate maximization at a per-block sum power: bisects the power
// price so the weighted solver spends exactly power_budget.
P3Solution weighted_sum_rate(const ChannelMatrix& h, const WeightVector& weights, double power_budget,
                             const P3Config& config = {});

// Proportional-fair block: weights 1/max(rbar, 1e-6), full power, then the
// average update with config.eps.
RateVector pfs_step(const ChannelMatrix& h, PfsState& state, double power_budget, const SolverConfig& config);

}  // namespace misobc
