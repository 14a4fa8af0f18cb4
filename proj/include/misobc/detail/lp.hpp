#pragma once

#include <Eigen/Dense>

namespace misobc::detail {

struct LpResult {
    Eigen::VectorXd x;      // primal solution
    Eigen::VectorXd y;      // duals of the equality rows
    double value = 0.0;     // c . x
    bool feasible = false;  // false: x holds the phase-1 point, y is meaningless
};

// minimize c . x  s.t.  A x = b,  x >= 0, by a dense two-phase simplex.
// Dantzig pricing with a fallback to Bland's rule on degenerate stalls.
// Intended for the small master problems of the dual loops (a handful of rows,
// at most a few hundred columns). The problem must be bounded when feasible.
LpResult solve_standard_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                           double tol = 1e-11);

}  // namespace misobc::detail
