#pragma once

#include <vector>

#include "misobc/error.hpp"
#include "misobc/types.hpp"

namespace misobc {

// Tolerances for the weighted power-minus-rate problem
//   minimize sum_k q_k - sum_k beta_k R_k  over q >= 0,
// with R the successive-decoding vertex for the weight-sorted order.
struct P3Config {
    double obj_tol = 1e-9;        // sweep objective decrease
    double kkt_tol = 1e-9;        // stationarity residual required at exit
    double q_tol = 1e-12;         // powers below this count as zero in the KKT test
    double bisect_tol = 1e-10;    // relative interval width for the scalar root
    double root_tol = 1e-10;      // |d(q) - ln 2| accepted as a root
    int max_sweeps = 500;
    bool record_steps = false;    // keep the objective after every coordinate step
};

struct P3Solution {
    PowerVector q;
    DecodingOrder order;
    RateVector rates;
    double objective = 0.0;
    int iterations = 0;           // completed sweeps
    double kkt_residual = 0.0;
    SolveStatus status = SolveStatus::converged;
    std::vector<double> step_objectives;  // only with record_steps
};

// Sorts weights descending, ties broken by ascending user index.
DecodingOrder order_from_weights(const WeightVector& beta);

// Objective value of the weighted problem at q, using order_from_weights(beta).
double p3_objective(const ChannelMatrix& h, const PowerVector& q, const WeightVector& beta);

// Left-hand side of the per-coordinate stationarity condition for user m,
//   d(q_m) = sum_{k >= rank(m)} (beta_pi(k) - beta_pi(k+1)) h_m A_k(q_m)^{-1} h_m^H,
// evaluated directly from the current powers (q_m included in A_k). Natural-log
// units: the optimum satisfies d(q_m) = ln 2 when q_m > 0.
double kkt_function(const ChannelMatrix& h, const PowerVector& q, int m, const WeightVector& beta);

// Exact minimizer over q_m >= 0 with the other powers fixed: 0 if d(0) <= ln 2,
// otherwise the root of d = ln 2 found by bisection on [0, beta_m / ln 2].
double coordinate_min(const ChannelMatrix& h, const PowerVector& q, int m, const WeightVector& beta,
                      const P3Config& config = {});

// Cyclic block-coordinate descent. `warm` (optional) seeds the powers.
P3Solution solve_p3(const ChannelMatrix& h, const WeightVector& beta, const P3Config& config = {},
                    const PowerVector* warm = nullptr);

// Stationarity residual of a candidate point: for q_k > q_tol, |d_k - ln 2|;
// otherwise max(0, d_k - ln 2).
double kkt_residual(const ChannelMatrix& h, const PowerVector& q, const WeightVector& beta,
                    double q_tol = 1e-12);

}  // namespace misobc
