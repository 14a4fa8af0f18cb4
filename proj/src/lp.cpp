#include "misobc/detail/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "misobc/error.hpp"

namespace misobc::detail {

namespace {

// Tableau over [x | artificials | rhs]; the last row holds reduced costs.
class Simplex {
public:
    Simplex(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tol)
        : m_(a.rows()), n_(a.cols()), tol_(tol), t_(a.rows() + 1, a.cols() + a.rows() + 1),
          basis_(static_cast<std::size_t>(a.rows())), sign_(a.rows()) {
        t_.setZero();
        for (Eigen::Index i = 0; i < m_; ++i) {
            sign_(i) = b(i) < 0.0 ? -1.0 : 1.0;
            t_.row(i).head(n_) = sign_(i) * a.row(i);
            t_(i, n_ + i) = 1.0;
            t_(i, rhs()) = sign_(i) * b(i);
            basis_[static_cast<std::size_t>(i)] = n_ + i;
        }
        blocked_.assign(static_cast<std::size_t>(n_ + m_), 0);
    }

    Eigen::Index rhs() const { return n_ + m_; }

    void set_costs(const Eigen::VectorXd& full_cost) {
        cost_ = full_cost;
        t_.row(m_).setZero();
        t_.row(m_).head(n_ + m_) = full_cost.transpose();
        for (Eigen::Index i = 0; i < m_; ++i) {
            const double cb = full_cost(basis_[static_cast<std::size_t>(i)]);
            if (cb != 0.0) t_.row(m_) -= cb * t_.row(i);
        }
    }

    void optimize() {
        const int max_pivots = 50 * static_cast<int>(n_ + 2 * m_ + 10);
        int degenerate = 0;
        for (int it = 0; it < max_pivots; ++it) {
            const bool bland = degenerate > 2 * (m_ + 1);
            Eigen::Index entering = -1;
            double most = -tol_;
            for (Eigen::Index j = 0; j < n_ + m_; ++j) {
                if (blocked_[static_cast<std::size_t>(j)]) continue;
                const double r = t_(m_, j);
                if (r < most) {
                    entering = j;
                    if (bland) break;
                    most = r;
                }
            }
            if (entering < 0) return;
            Eigen::Index leaving = -1;
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < m_; ++i) {
                const double coef = t_(i, entering);
                if (coef <= tol_) continue;
                const double ratio = t_(i, rhs()) / coef;
                if (ratio < best - 1e-14 ||
                    (ratio <= best + 1e-14 && leaving >= 0 &&
                     basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leaving)])) {
                    best = ratio;
                    leaving = i;
                }
            }
            if (leaving < 0) throw Error("linear program is unbounded");
            degenerate = (best <= tol_) ? degenerate + 1 : 0;
            pivot(leaving, entering);
        }
        throw Error("linear program: pivot limit reached");
    }

    void pivot(Eigen::Index row, Eigen::Index col) {
        t_.row(row) /= t_(row, col);
        for (Eigen::Index i = 0; i <= m_; ++i) {
            if (i == row) continue;
            const double f = t_(i, col);
            if (f != 0.0) t_.row(i) -= f * t_.row(row);
        }
        basis_[static_cast<std::size_t>(row)] = col;
    }

    // Replace basic artificials at level zero by structural columns, then
    // keep every artificial out of the basis.
    void drop_artificials() {
        for (Eigen::Index i = 0; i < m_; ++i) {
            if (basis_[static_cast<std::size_t>(i)] < n_) continue;
            for (Eigen::Index j = 0; j < n_; ++j) {
                if (std::abs(t_(i, j)) > 1e-9 && !is_basic(j)) {
                    pivot(i, j);
                    break;
                }
            }
        }
        for (Eigen::Index j = n_; j < n_ + m_; ++j) blocked_[static_cast<std::size_t>(j)] = 1;
    }

    bool is_basic(Eigen::Index j) const {
        for (auto b : basis_) {
            if (b == j) return true;
        }
        return false;
    }

    Eigen::VectorXd values() const {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n_ + m_);
        for (Eigen::Index i = 0; i < m_; ++i) x(basis_[static_cast<std::size_t>(i)]) = std::max(0.0, t_(i, rhs()));
        return x;
    }

    // y = c_B B^{-1}, read from the artificial columns; row signs undone.
    Eigen::VectorXd duals() const {
        Eigen::VectorXd y(m_);
        for (Eigen::Index i = 0; i < m_; ++i) y(i) = sign_(i) * (cost_(n_ + i) - t_(m_, n_ + i));
        return y;
    }

private:
    Eigen::Index m_;
    Eigen::Index n_;
    double tol_;
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> t_;
    std::vector<Eigen::Index> basis_;
    std::vector<char> blocked_;
    Eigen::VectorXd sign_;
    Eigen::VectorXd cost_;
};

}  // namespace

LpResult solve_standard_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                           double tol) {
    const Eigen::Index m = a.rows();
    const Eigen::Index n = a.cols();
    if (c.size() != n || b.size() != m || n == 0) {
        throw DimensionError("linear program: inconsistent dimensions");
    }
    Simplex s(a, b, tol);
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n + m);
    phase1.tail(m).setOnes();
    s.set_costs(phase1);
    s.optimize();

    LpResult out;
    Eigen::VectorXd x = s.values();
    const double infeasibility = x.tail(m).sum();
    out.feasible = infeasibility <= 1e-9 * (1.0 + b.cwiseAbs().sum());
    if (out.feasible) {
        s.drop_artificials();
        Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(n + m);
        phase2.head(n) = c;
        s.set_costs(phase2);
        s.optimize();
        x = s.values();
        out.y = s.duals();
    }
    out.x = x.head(n);
    out.value = c.dot(out.x);
    return out;
}

}  // namespace misobc::detail
