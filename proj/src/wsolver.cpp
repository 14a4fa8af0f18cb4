#include "misobc/wsolver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "misobc/macregion.hpp"

namespace misobc {

namespace {

constexpr double kLn2 = std::numbers::ln2;

void check_weights(const ChannelMatrix& h, const WeightVector& beta) {
    if (beta.size() != h.rows()) {
        throw DimensionError("weight vector length must equal the number of users");
    }
    for (Eigen::Index k = 0; k < beta.size(); ++k) {
        if (!(beta(k) >= 0.0) || !std::isfinite(beta(k))) {
            throw DimensionError("weights must be finite and nonnegative");
        }
    }
}

// Cumulative inverses B_p^{-1}, B_p = I + sum_{i <= p} q_pi(i) h^H h, kept in
// sync with the powers through rank-one updates and rebuilt once per sweep.
class Workspace {
public:
    Workspace(const ChannelMatrix& h, const WeightVector& beta)
        : h_(h), beta_(beta), order_(order_from_weights(beta)), users_(static_cast<int>(h.rows())),
          m_(h.cols()), weight_(users_), rank_(static_cast<std::size_t>(users_)),
          binv_(static_cast<std::size_t>(users_)), logdet_(users_) {
        for (int p = 0; p < users_; ++p) {
            const double next = (p + 1 < users_) ? beta(order_[p + 1]) : 0.0;
            weight_(p) = beta(order_[p]) - next;
            rank_[static_cast<std::size_t>(order_[p])] = p;
        }
        t_.resize(users_);
        v_.assign(static_cast<std::size_t>(users_), Eigen::VectorXcd(m_));
    }

    const DecodingOrder& order() const { return order_; }

    // Rebuild inverses and log-determinants from scratch; returns the objective.
    double rebuild(const PowerVector& q) {
        Eigen::MatrixXcd b = Eigen::MatrixXcd::Identity(m_, m_);
        for (int p = 0; p < users_; ++p) {
            const int u = order_[p];
            if (q(u) != 0.0) {
                b.noalias() += q(u) * (h_.row(u).adjoint() * h_.row(u));
            }
            Eigen::LLT<Eigen::MatrixXcd> llt(b);
            const auto& l = llt.matrixLLT();
            double acc = 0.0;
            for (Eigen::Index i = 0; i < m_; ++i) acc += std::log(l(i, i).real());
            logdet_(p) = 2.0 * acc;
            binv_[static_cast<std::size_t>(p)] = llt.solve(Eigen::MatrixXcd::Identity(m_, m_));
        }
        return objective(q);
    }

    double objective(const PowerVector& q) const {
        return q.sum() - weight_.dot(logdet_) / kLn2;
    }

    // t_p = h_m B_p^{-1} h_m^H for p >= rank(m); also caches B_p^{-1} h_m^H.
    void project(int m) {
        const int r = rank_[static_cast<std::size_t>(m)];
        const auto hm = h_.row(m);
        for (int p = r; p < users_; ++p) {
            auto& v = v_[static_cast<std::size_t>(p)];
            v.noalias() = binv_[static_cast<std::size_t>(p)] * hm.adjoint();
            t_(p) = std::max(0.0, (hm * v)(0).real());
        }
    }

    // d(q_m) at the current powers, from the cached projections.
    double d_current(int m) const {
        const int r = rank_[static_cast<std::size_t>(m)];
        double d = 0.0;
        for (int p = r; p < users_; ++p) d += weight_(p) * t_(p);
        return d;
    }

    // Minimizes over q_m with the others fixed. Requires project(m) first.
    // Returns the objective change.
    double update(PowerVector& q, int m, const P3Config& config) {
        const int r = rank_[static_cast<std::size_t>(m)];
        const double qm = q(m);
        // s_p: quadratic form with user m's own term removed from B_p.
        for (int p = r; p < users_; ++p) {
            const double denom = 1.0 - qm * t_(p);
            scratch_s_[p - r] = denom > 0.0 ? t_(p) / denom : t_(p);
        }
        auto d = [&](double x) {
            double acc = 0.0;
            for (int p = r; p < users_; ++p) {
                const double s = scratch_s_[p - r];
                acc += weight_(p) * s / (1.0 + x * s);
            }
            return acc;
        };
        const double target = minimize_scalar(d, beta_(m), config);
        const double delta = target - qm;
        if (delta == 0.0) return 0.0;
        double change = delta;
        for (int p = r; p < users_; ++p) {
            const double denom = 1.0 + delta * t_(p);
            auto& v = v_[static_cast<std::size_t>(p)];
            binv_[static_cast<std::size_t>(p)].noalias() -= (delta / denom) * (v * v.adjoint());
            const double step = std::log(denom);
            logdet_(p) += step;
            change -= weight_(p) * step / kLn2;
        }
        q(m) = target;
        return change;
    }

    template <class D>
    static double minimize_scalar(const D& d, double beta_m, const P3Config& config) {
        if (d(0.0) <= kLn2) return 0.0;
        double lo = 0.0;
        double hi = beta_m / kLn2;
        const double width_tol = config.bisect_tol * (1.0 + hi);
        for (int iter = 0; iter < 400 && hi - lo > width_tol; ++iter) {
            const double mid = 0.5 * (lo + hi);
            const double value = d(mid);
            if (std::abs(value - kLn2) < config.root_tol) return mid;
            if (value > kLn2) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    }

    double residual(const PowerVector& q, double q_tol) {
        double worst = 0.0;
        for (int m = 0; m < users_; ++m) {
            project(m);
            const double dm = d_current(m);
            const double res = (q(m) > q_tol) ? std::abs(dm - kLn2) : std::max(0.0, dm - kLn2);
            worst = std::max(worst, res);
        }
        return worst;
    }

    void prepare_scratch() { scratch_s_.assign(static_cast<std::size_t>(users_), 0.0); }

private:
    const ChannelMatrix& h_;
    const WeightVector& beta_;
    DecodingOrder order_;
    int users_;
    Eigen::Index m_;
    Eigen::VectorXd weight_;
    std::vector<int> rank_;
    std::vector<Eigen::MatrixXcd> binv_;
    Eigen::VectorXd logdet_;
    Eigen::VectorXd t_;
    std::vector<Eigen::VectorXcd> v_;
    std::vector<double> scratch_s_;
};

}  // namespace

DecodingOrder order_from_weights(const WeightVector& beta) {
    std::vector<int> perm(static_cast<std::size_t>(beta.size()));
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) { return beta(a) > beta(b); });
    return DecodingOrder(std::move(perm));
}

double p3_objective(const ChannelMatrix& h, const PowerVector& q, const WeightVector& beta) {
    detail::check_powers(h, q);
    check_weights(h, beta);
    const auto order = order_from_weights(beta);
    const auto k_users = static_cast<int>(h.rows());
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Identity(h.cols(), h.cols());
    double value = q.sum();
    for (int p = 0; p < k_users; ++p) {
        const int u = order[p];
        b.noalias() += q(u) * (h.row(u).adjoint() * h.row(u));
        const double next = (p + 1 < k_users) ? beta(order[p + 1]) : 0.0;
        const double w = beta(u) - next;
        if (w != 0.0) value -= w * detail::logdet_hpd(b) / kLn2;
    }
    return value;
}

double kkt_function(const ChannelMatrix& h, const PowerVector& q, int m, const WeightVector& beta) {
    detail::check_powers(h, q);
    check_weights(h, beta);
    const auto k_users = static_cast<int>(h.rows());
    if (m < 0 || m >= k_users) {
        throw DimensionError("kkt_function: user index out of range");
    }
    const auto order = order_from_weights(beta);
    const int r = order.rank_of(m);
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(h.cols(), h.cols());
    double d = 0.0;
    for (int p = 0; p < k_users; ++p) {
        const int u = order[p];
        a.noalias() += q(u) * (h.row(u).adjoint() * h.row(u));
        if (p < r) continue;
        const double next = (p + 1 < k_users) ? beta(order[p + 1]) : 0.0;
        const double w = beta(u) - next;
        const Eigen::VectorXcd x = a.llt().solve(h.row(m).adjoint());
        d += w * (h.row(m) * x)(0).real();
    }
    return d;
}

double coordinate_min(const ChannelMatrix& h, const PowerVector& q, int m, const WeightVector& beta,
                      const P3Config& config) {
    detail::check_powers(h, q);
    check_weights(h, beta);
    if (m < 0 || m >= h.rows()) {
        throw DimensionError("coordinate_min: user index out of range");
    }
    if (beta(m) == 0.0) return 0.0;
    Workspace ws(h, beta);
    ws.prepare_scratch();
    ws.rebuild(q);
    ws.project(m);
    PowerVector updated = q;
    ws.update(updated, m, config);
    return updated(m);
}

double kkt_residual(const ChannelMatrix& h, const PowerVector& q, const WeightVector& beta, double q_tol) {
    detail::check_powers(h, q);
    check_weights(h, beta);
    Workspace ws(h, beta);
    ws.prepare_scratch();
    ws.rebuild(q);
    return ws.residual(q, q_tol);
}

P3Solution solve_p3(const ChannelMatrix& h, const WeightVector& beta, const P3Config& config,
                    const PowerVector* warm) {
    check_weights(h, beta);
    const auto k_users = static_cast<int>(h.rows());
    P3Solution sol;
    sol.q = PowerVector::Zero(k_users);
    if (warm != nullptr) {
        detail::check_powers(h, *warm);
        sol.q = *warm;
    }
    for (int k = 0; k < k_users; ++k) {
        if (beta(k) == 0.0) sol.q(k) = 0.0;
    }

    Workspace ws(h, beta);
    ws.prepare_scratch();
    sol.order = ws.order();

    double objective = ws.rebuild(sol.q);
    double residual = ws.residual(sol.q, config.q_tol);
    if (config.record_steps) sol.step_objectives.push_back(objective);

    sol.status = SolveStatus::max_iterations;
    int sweep = 0;
    if (residual <= config.kkt_tol) {
        sol.status = SolveStatus::converged;
    } else {
        for (; sweep < config.max_sweeps; ++sweep) {
            const double before = objective;
            const PowerVector previous = sol.q;
            for (int m = 0; m < k_users; ++m) {
                if (beta(m) == 0.0) continue;
                ws.project(m);
                objective += ws.update(sol.q, m, config);
                if (config.record_steps) sol.step_objectives.push_back(objective);
            }
            objective = ws.rebuild(sol.q);
            residual = ws.residual(sol.q, config.q_tol);
            if (residual <= config.kkt_tol) {
                sol.status = SolveStatus::converged;
                ++sweep;
                break;
            }
            // Stalled at rounding level: neither the objective nor the powers move.
            const double moved = (sol.q - previous).cwiseAbs().maxCoeff();
            if (before - objective < config.obj_tol * 1e-6 * (1.0 + std::abs(objective)) &&
                moved <= 1e-14 * (1.0 + sol.q.cwiseAbs().maxCoeff())) {
                ++sweep;
                break;
            }
        }
    }
    sol.iterations = sweep;
    sol.objective = objective;
    sol.kkt_residual = residual;
    sol.rates = corner_rates(h, sol.q, sol.order);
    return sol;
}

}  // namespace misobc
