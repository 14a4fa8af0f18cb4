#include "misobc/detail/cutting_plane.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "misobc/detail/lp.hpp"
#include "misobc/error.hpp"

namespace misobc::detail {

namespace {
constexpr double kAccept = 0.1;  // fraction of the predicted increase a serious step must realize
}

CuttingPlane::CuttingPlane(Eigen::VectorXd start, Eigen::VectorXd targets, double radius, int max_columns)
    : targets_(std::move(targets)), query_(start.cwiseMax(0.0)), center_(query_),
      center_value_(-std::numeric_limits<double>::infinity()),
      model_value_(std::numeric_limits<double>::infinity()), radius_(radius), max_columns_(max_columns) {
    if (query_.size() != targets_.size() || !(radius > 0.0) || max_columns < 2) {
        throw DimensionError("cutting plane: bad dimensions or parameters");
    }
}

void CuttingPlane::add(double cost, const Eigen::VectorXd& levels, double value) {
    if (levels.size() != targets_.size()) {
        throw DimensionError("cutting plane: column length mismatch");
    }
    const bool first = costs_.empty();
    costs_.push_back(cost);
    levels_.push_back(levels);

    if (first || value >= center_value_ + kAccept * (model_value_ - center_value_)) {
        const double moved = first ? 0.0 : (query_ - center_).cwiseAbs().maxCoeff();
        if (!first && moved >= 0.999 * radius_) radius_ *= 2.0;
        if (first || value > center_value_) {
            center_ = query_;
            center_value_ = value;
        }
    } else if (value < center_value_) {
        radius_ = std::max(0.5 * radius_, 1e-10 * (1.0 + center_.cwiseAbs().maxCoeff()));
    }

    if (static_cast<int>(costs_.size()) > max_columns_) {
        // Drop the cut that is slackest at the center.
        std::size_t worst = 0;
        double slack = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < costs_.size(); ++j) {
            const double s = costs_[j] - center_.dot(levels_[j] - targets_);
            if (s > slack) {
                slack = s;
                worst = j;
            }
        }
        costs_.erase(costs_.begin() + static_cast<std::ptrdiff_t>(worst));
        levels_.erase(levels_.begin() + static_cast<std::ptrdiff_t>(worst));
    }
    solve_master();
}

void CuttingPlane::solve_master() {
    const auto d = targets_.size();
    const auto n = static_cast<Eigen::Index>(costs_.size());
    if (d == 0) {
        model_value_ = *std::min_element(costs_.begin(), costs_.end());
        return;
    }
    const Eigen::VectorXd lower = (center_.array() - radius_).cwiseMax(0.0).matrix();
    const Eigen::VectorXd upper = center_.array() + radius_;

    // Columns [theta | s | v | u]; rows: sum theta a + s - v - u = b, sum theta = 1.
    Eigen::MatrixXd eq = Eigen::MatrixXd::Zero(d + 1, n + 3 * d);
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(n + 3 * d);
    for (Eigen::Index j = 0; j < n; ++j) {
        eq.col(j).head(d) = levels_[static_cast<std::size_t>(j)];
        eq(d, j) = 1.0;
        cost(j) = costs_[static_cast<std::size_t>(j)];
    }
    eq.block(0, n, d, d).setIdentity();
    eq.block(0, n + d, d, d) = -Eigen::MatrixXd::Identity(d, d);
    eq.block(0, n + 2 * d, d, d) = -Eigen::MatrixXd::Identity(d, d);
    cost.segment(n, d) = upper;
    cost.segment(n + d, d) = -lower;
    Eigen::VectorXd rhs(d + 1);
    rhs.head(d) = targets_;
    rhs(d) = 1.0;

    const auto lp = solve_standard_lp(cost, eq, rhs);
    if (!lp.feasible) {
        throw Error("cutting plane: master problem infeasible");
    }
    query_ = lp.y.head(d).cwiseMax(lower).cwiseMin(upper);
    model_value_ = lp.value;
}

}  // namespace misobc::detail
