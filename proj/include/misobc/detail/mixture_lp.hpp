#pragma once

#include <Eigen/Dense>

namespace misobc::detail {

struct MixtureResult {
    Eigen::VectorXd weights;  // theta, nonnegative, sums to 1
    double cost = 0.0;        // c . theta
    double violation = 0.0;   // sum_i max(0, b_i - (A theta)_i)
    bool feasible = false;
};

// Cheapest convex combination of columns meeting row lower bounds:
//   minimize c . theta  s.t.  A theta >= b,  sum theta = 1,  theta >= 0.
// A is rows x columns. When no combination meets the bounds the result holds
// the combination of least total violation and feasible = false.
// Meant for a few hundred columns at most.
MixtureResult solve_mixture_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& a,
                               const Eigen::VectorXd& b, double tol = 1e-10);

}  // namespace misobc::detail
