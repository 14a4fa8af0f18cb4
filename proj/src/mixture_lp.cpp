#include "misobc/detail/mixture_lp.hpp"

#include "misobc/detail/lp.hpp"
#include "misobc/error.hpp"

namespace misobc::detail {

MixtureResult solve_mixture_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                               double tol) {
    const Eigen::Index n = c.size();
    if (n == 0 || a.cols() != n || a.rows() != b.size()) {
        throw DimensionError("mixture LP: inconsistent dimensions");
    }
    const Eigen::Index m = a.rows();

    // Columns [theta | surplus]: A theta - u = b, sum theta = 1.
    Eigen::MatrixXd eq = Eigen::MatrixXd::Zero(m + 1, n + m);
    eq.topLeftCorner(m, n) = a;
    eq.block(0, n, m, m) = -Eigen::MatrixXd::Identity(m, m);
    eq.row(m).head(n).setOnes();
    Eigen::VectorXd rhs(m + 1);
    rhs.head(m) = b;
    rhs(m) = 1.0;
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(n + m);
    cost.head(n) = c;

    MixtureResult result;
    auto lp = solve_standard_lp(cost, eq, rhs, tol);
    if (lp.feasible) {
        result.weights = lp.x.head(n);
        result.feasible = true;
    } else {
        // Least total violation: add a priced shortfall column per row.
        Eigen::MatrixXd relaxed = Eigen::MatrixXd::Zero(m + 1, n + 2 * m);
        relaxed.leftCols(n + m) = eq;
        relaxed.block(0, n + m, m, m) = Eigen::MatrixXd::Identity(m, m);
        Eigen::VectorXd shortfall = Eigen::VectorXd::Zero(n + 2 * m);
        shortfall.tail(m).setOnes();
        auto fallback = solve_standard_lp(shortfall, relaxed, rhs, tol);
        result.weights = fallback.x.head(n);
    }
    const double total = result.weights.sum();
    if (total > 0.0) result.weights /= total;
    result.cost = c.dot(result.weights);
    result.violation = (b - a * result.weights).cwiseMax(0.0).sum();
    const double scale = 1.0 + (m > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
    result.feasible = result.feasible || result.violation <= tol * scale;
    return result;
}

}  // namespace misobc::detail
