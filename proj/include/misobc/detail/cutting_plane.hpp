#pragma once

#include <vector>

#include <Eigen/Dense>

namespace misobc::detail {

// Trust-region cutting-plane maximizer for a concave dual function
//   g(y) = min_x c(x) - y . (a(x) - b),  y >= 0,
// given an oracle that returns a minimizing column (c, a) at a query point.
// Every column contributes the cut c - y . (a - b); the next query maximizes
// the cut model over a box around the best point found so far.
class CuttingPlane {
public:
    CuttingPlane(Eigen::VectorXd start, Eigen::VectorXd targets, double radius, int max_columns);

    const Eigen::VectorXd& query() const { return query_; }

    // Oracle answer at query(): column (cost, levels) and a lower bound on
    // g(query()) (equal to the cut value when the oracle is exact).
    void add(double cost, const Eigen::VectorXd& levels, double value);

    const Eigen::VectorXd& center() const { return center_; }
    double center_value() const { return center_value_; }
    // Maximum of the cut model over the current box.
    double model_value() const { return model_value_; }
    double radius() const { return radius_; }

    const std::vector<double>& costs() const { return costs_; }
    const std::vector<Eigen::VectorXd>& levels() const { return levels_; }

private:
    void solve_master();

    Eigen::VectorXd targets_;
    Eigen::VectorXd query_;
    Eigen::VectorXd center_;
    double center_value_;
    double model_value_;
    double radius_;
    int max_columns_;
    std::vector<double> costs_;
    std::vector<Eigen::VectorXd> levels_;
};

}  // namespace misobc::detail
