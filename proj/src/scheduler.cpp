#include "misobc/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <string>

#include "misobc/detail/cutting_plane.hpp"
#include "misobc/detail/mixture_lp.hpp"
#include "misobc/macregion.hpp"

namespace misobc {

void SolverConfig::validate() const {
    const bool ok = step_mu > 0 && step_delta > 0 && max_step > 0 && eps > 0 && eps < 1 && rate_tol > 0 &&
                    dc_tol >= 0 && gap_tol > 0 && inner_gap_tol > 0 && max_outer > 0 && max_inner > 0 &&
                    columns >= 2 && power_cap > 0 && mu_init >= 0 && delta_init >= 0;
    if (!ok) {
        throw ConfigError("solver configuration: steps, tolerances and limits must be positive, 0 < eps < 1");
    }
}

std::vector<UserProfile> indexed_profiles(std::span<const UserProfile> profiles, int users) {
    if (static_cast<int>(profiles.size()) != users) {
        throw DimensionError("need exactly one profile per user");
    }
    std::vector<UserProfile> out(static_cast<std::size_t>(users));
    std::vector<char> seen(static_cast<std::size_t>(users), 0);
    for (const auto& p : profiles) {
        if (p.user_id < 0 || p.user_id >= users || seen[static_cast<std::size_t>(p.user_id)]) {
            throw DimensionError("profiles must list users 0..K-1 exactly once");
        }
        if (!(p.target_rate >= 0.0) || !std::isfinite(p.target_rate)) {
            throw DimensionError("target rates must be finite and nonnegative");
        }
        seen[static_cast<std::size_t>(p.user_id)] = 1;
        out[static_cast<std::size_t>(p.user_id)] = p;
    }
    return out;
}

Eigen::VectorXd mu_update(const Eigen::VectorXd& mu, const Eigen::VectorXd& targets,
                          const Eigen::VectorXd& avg_rates, double step) {
    if (mu.size() != targets.size() || mu.size() != avg_rates.size()) {
        throw DimensionError("mu_update: length mismatch");
    }
    return (mu + step * (targets - avg_rates)).cwiseMax(0.0);
}

Eigen::VectorXd delta_update(const Eigen::VectorXd& delta, const Eigen::VectorXd& targets,
                             const Eigen::VectorXd& rates, double step) {
    if (delta.size() != targets.size() || delta.size() != rates.size()) {
        throw DimensionError("delta_update: length mismatch");
    }
    return (delta + step * (targets - rates)).cwiseMax(0.0);
}

Eigen::VectorXd rate_average(const Eigen::VectorXd& rbar, const Eigen::VectorXd& rates, double eps) {
    if (rbar.size() != rates.size()) {
        throw DimensionError("rate_average: length mismatch");
    }
    return (1.0 - eps) * rbar + eps * rates;
}

StepController::StepController(Eigen::Index size, double initial, StepRule rule, double max_step)
    : step_(Eigen::VectorXd::Constant(size, initial)), last_sign_(Eigen::VectorXd::Zero(size)), rule_(rule),
      max_step_(max_step) {}

Eigen::VectorXd StepController::advance(const Eigen::VectorXd& x, const Eigen::VectorXd& residual) {
    Eigen::VectorXd next = (x.array() + step_.array() * residual.array()).cwiseMax(0.0).matrix();
    if (rule_ == StepRule::adaptive) {
        for (Eigen::Index k = 0; k < x.size(); ++k) {
            // A coordinate pinned at zero by the projection keeps its step.
            if (next(k) == 0.0 && x(k) == 0.0) continue;
            const double sign = (residual(k) > 0.0) - (residual(k) < 0.0);
            if (sign != 0.0 && last_sign_(k) != 0.0) {
                step_(k) = (sign == last_sign_(k)) ? std::min(max_step_, 1.5 * step_(k)) : 0.5 * step_(k);
            }
            last_sign_(k) = sign;
        }
    }
    return next;
}

namespace {

struct InnerColumn {
    PowerVector q;
    RateVector rates;
    DecodingOrder order;
    double cost = 0.0;
};

struct Recovered {
    PowerVector q;
    RateVector rates;
    DecodingOrder order;
    double cost = std::numeric_limits<double>::infinity();
    int used = 0;
};

Recovered recover(const detail::MixtureResult& mixture, const std::deque<InnerColumn>& columns) {
    Recovered r;
    r.q = PowerVector::Zero(columns.front().q.size());
    r.rates = RateVector::Zero(columns.front().rates.size());
    Eigen::Index dominant = 0;
    for (Eigen::Index j = 0; j < mixture.weights.size(); ++j) {
        const double w = mixture.weights(j);
        if (w <= 0.0) continue;
        const auto& c = columns[static_cast<std::size_t>(j)];
        r.q += w * c.q;
        r.rates += w * c.rates;
        if (w > mixture.weights(dominant)) dominant = j;
        if (w > 1e-12) ++r.used;
    }
    r.order = columns[static_cast<std::size_t>(dominant)].order;
    r.cost = mixture.cost;
    return r;
}

std::vector<int> users_of(const std::vector<UserProfile>& profiles, TrafficClass c) {
    std::vector<int> out;
    for (const auto& p : profiles) {
        if (p.traffic == c) out.push_back(p.user_id);
    }
    return out;
}

double ndc_reward(const std::vector<int>& ndc, const Eigen::VectorXd& mu, const RateVector& rates) {
    double acc = 0.0;
    for (int k : ndc) acc += mu(k) * rates(k);
    return acc;
}

// Chooses the next multipliers from the evaluated iterates, by subgradient
// steps or by the cutting-plane model.
class MultiplierSearch {
public:
    MultiplierSearch(const Eigen::VectorXd& start, const Eigen::VectorXd& targets, const SolverConfig& config,
                     double step)
        : targets_(targets), point_(start), steps_(start.size(), step, config.step_rule, config.max_step),
          rule_(config.step_rule) {
        if (rule_ == StepRule::cutting_plane) {
            const double scale = start.size() > 0 ? start.cwiseAbs().maxCoeff() : 0.0;
            cp_.emplace(start, targets, config.radius * std::max(1.0, scale),
                        std::max(config.columns, 2));
        }
    }

    const Eigen::VectorXd& point() const { return rule_ == StepRule::cutting_plane ? cp_->query() : point_; }

    void report(double cost, const Eigen::VectorXd& levels, double value) {
        if (rule_ == StepRule::cutting_plane) {
            cp_->add(cost, levels, value);
        } else {
            point_ = steps_.advance(point_, targets_ - levels);
        }
    }

    // Model overestimate of the dual at the best point; zero for step rules.
    double model_gap() const {
        return rule_ == StepRule::cutting_plane ? cp_->model_value() - cp_->center_value() : 0.0;
    }

    // Best multipliers seen (cutting_plane) or the current iterate.
    Eigen::VectorXd best() const { return rule_ == StepRule::cutting_plane ? cp_->center() : point_; }

private:
    Eigen::VectorXd targets_;
    Eigen::VectorXd point_;
    StepController steps_;
    StepRule rule_;
    std::optional<detail::CuttingPlane> cp_;
};

}  // namespace

P2Result solve_p2(const ChannelMatrix& h, std::span<const UserProfile> profile_list, const Eigen::VectorXd& mu,
                  const SolverConfig& config, const Eigen::VectorXd* warm_delta, const PowerVector* warm_q) {
    const auto users = static_cast<int>(h.rows());
    const auto profiles = indexed_profiles(profile_list, users);
    if (mu.size() != users) {
        throw DimensionError("solve_p2: mu needs one entry per user");
    }
    const auto ndc = users_of(profiles, TrafficClass::ndc);
    const auto dc = users_of(profiles, TrafficClass::dc);

    WeightVector beta = WeightVector::Zero(users);
    for (int k : ndc) beta(k) = std::max(0.0, mu(k));

    P2Result out;
    out.delta = Eigen::VectorXd::Zero(users);

    if (dc.empty()) {
        auto sol = solve_p3(h, beta, config.p3, warm_q);
        out.q = std::move(sol.q);
        out.rates = std::move(sol.rates);
        out.order = std::move(sol.order);
        out.lagrangian = sol.objective;
        out.dual_bound = sol.objective;
        out.iterations = 1;
        out.status = sol.status;
        return out;
    }

    const auto dc_count = static_cast<Eigen::Index>(dc.size());
    Eigen::VectorXd targets(dc_count);
    for (Eigen::Index i = 0; i < dc_count; ++i) {
        const int k = dc[static_cast<std::size_t>(i)];
        targets(i) = profiles[static_cast<std::size_t>(k)].target_rate;
        if (targets(i) > 0.0 && h.row(k).squaredNorm() <= 1e-24) {
            throw InfeasibleError("DC user " + std::to_string(k) + " has a zero channel but a positive target");
        }
    }

    Eigen::VectorXd delta(dc_count);
    for (Eigen::Index i = 0; i < dc_count; ++i) {
        const int k = dc[static_cast<std::size_t>(i)];
        delta(i) = (warm_delta != nullptr) ? (*warm_delta)(k) : config.delta_init;
    }
    MultiplierSearch search(delta, targets, config, config.step_delta);

    std::deque<InnerColumn> columns;
    double best_bound = -std::numeric_limits<double>::infinity();
    PowerVector q_seed = (warm_q != nullptr) ? *warm_q : PowerVector::Zero(users);
    const Eigen::VectorXd floor = (targets.array() - config.dc_tol).cwiseMax(0.0).matrix();
    Recovered recovered;
    bool have_feasible = false;
    bool converged = false;
    int it = 0;

    for (; it < config.max_inner; ++it) {
        delta = search.point();
        for (Eigen::Index i = 0; i < dc_count; ++i) beta(dc[static_cast<std::size_t>(i)]) = delta(i);
        auto sol = solve_p3(h, beta, config.p3, &q_seed);
        q_seed = sol.q;

        // Inner dual function: P3 objective plus sum delta_k R_k*.
        const double value = sol.objective + delta.dot(targets);
        best_bound = std::max(best_bound, value);

        Eigen::VectorXd achieved(dc_count);
        for (Eigen::Index i = 0; i < dc_count; ++i) achieved(i) = sol.rates(dc[static_cast<std::size_t>(i)]);

        InnerColumn col;
        col.cost = sol.q.sum() - ndc_reward(ndc, beta, sol.rates);
        const double col_cost = col.cost;
        const double col_power = sol.q.sum();
        col.q = std::move(sol.q);
        col.rates = std::move(sol.rates);
        col.order = std::move(sol.order);
        columns.push_back(std::move(col));
        if (static_cast<int>(columns.size()) > config.columns) columns.pop_front();

        const bool last = it + 1 == config.max_inner;
        if (last || it % 8 == 7 || search.model_gap() <= 10.0 * config.inner_gap_tol * (1.0 + std::abs(best_bound))) {
            const auto n_cols = static_cast<Eigen::Index>(columns.size());
            Eigen::VectorXd costs(n_cols);
            Eigen::MatrixXd rates(dc_count, n_cols);
            for (Eigen::Index j = 0; j < n_cols; ++j) {
                const auto& c = columns[static_cast<std::size_t>(j)];
                costs(j) = c.cost;
                for (Eigen::Index i = 0; i < dc_count; ++i) rates(i, j) = c.rates(dc[static_cast<std::size_t>(i)]);
            }
            auto mixture = detail::solve_mixture_lp(costs, rates, floor);
            if (!have_feasible || (mixture.feasible && mixture.cost < recovered.cost)) {
                recovered = recover(mixture, columns);
                have_feasible = mixture.feasible;
            }
            if (mixture.feasible &&
                mixture.cost - best_bound <= config.inner_gap_tol * (1.0 + std::abs(mixture.cost))) {
                converged = true;
                ++it;
                break;
            }
        }
        if (col_power > config.power_cap && ((targets - achieved).array() > config.dc_tol).any()) {
            throw InfeasibleError("DC targets need more than the per-state power cap");
        }
        search.report(col_cost, achieved, value);
    }
    delta = search.best();

    out.q = std::move(recovered.q);
    out.rates = std::move(recovered.rates);
    out.order = std::move(recovered.order);
    out.time_shared = recovered.used > 1;
    out.lagrangian = recovered.cost;
    out.dual_bound = best_bound;
    out.iterations = it;
    out.status = converged ? SolveStatus::converged : SolveStatus::max_iterations;
    for (Eigen::Index i = 0; i < dc_count; ++i) out.delta(dc[static_cast<std::size_t>(i)]) = delta(i);
    return out;
}

namespace {

struct OuterColumn {
    std::vector<PowerVector> q;
    std::vector<RateVector> rates;
    std::vector<DecodingOrder> order;
    double power = 0.0;
    Eigen::VectorXd avg_rates;
};

}  // namespace

OfflineResult solve_p1_offline(const ChannelSet& channels, std::span<const UserProfile> profile_list,
                               const SolverConfig& config, const DualState* warm) {
    config.validate();
    const int users = channels.users();
    const int states = channels.size();
    const auto profiles = indexed_profiles(profile_list, users);
    const auto ndc = users_of(profiles, TrafficClass::ndc);

    Eigen::VectorXd targets(users);
    for (int k = 0; k < users; ++k) targets(k) = profiles[static_cast<std::size_t>(k)].target_rate;

    Eigen::VectorXd mu = Eigen::VectorXd::Zero(users);
    for (int k : ndc) mu(k) = config.mu_init;
    std::vector<Eigen::VectorXd> delta(static_cast<std::size_t>(states), Eigen::VectorXd::Zero(users));
    for (auto& d : delta) {
        for (int k = 0; k < users; ++k) {
            if (profiles[static_cast<std::size_t>(k)].traffic == TrafficClass::dc) d(k) = config.delta_init;
        }
    }
    if (warm != nullptr) {
        if (warm->mu.size() == users) {
            for (int k : ndc) mu(k) = warm->mu(k);
        }
        if (static_cast<int>(warm->delta.size()) == states) {
            for (int n = 0; n < states; ++n) {
                if (warm->delta[static_cast<std::size_t>(n)].size() == users) delta[static_cast<std::size_t>(n)] = warm->delta[static_cast<std::size_t>(n)];
            }
        }
    }
    std::vector<PowerVector> q_seed(static_cast<std::size_t>(states), PowerVector::Zero(users));

    const auto ndc_count = static_cast<Eigen::Index>(ndc.size());
    Eigen::VectorXd ndc_targets(ndc_count);
    Eigen::VectorXd ndc_mu(ndc_count);
    for (Eigen::Index i = 0; i < ndc_count; ++i) {
        ndc_targets(i) = targets(ndc[static_cast<std::size_t>(i)]);
        ndc_mu(i) = mu(ndc[static_cast<std::size_t>(i)]);
    }
    MultiplierSearch search(ndc_mu, ndc_targets, config, config.step_mu);
    const Eigen::VectorXd ndc_floor = (ndc_targets.array() - config.ndc_tol).cwiseMax(0.0).matrix();

    OfflineResult result;
    std::deque<OuterColumn> columns;
    double best_bound = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_mu = mu;
    detail::MixtureResult mixture;
    bool converged = false;
    bool inner_ok = true;
    int iter = 0;

    for (; iter < config.max_outer; ++iter) {
        ndc_mu = search.point();
        for (Eigen::Index i = 0; i < ndc_count; ++i) mu(ndc[static_cast<std::size_t>(i)]) = ndc_mu(i);
        OuterColumn col;
        col.q.resize(static_cast<std::size_t>(states));
        col.rates.resize(static_cast<std::size_t>(states));
        col.order.resize(static_cast<std::size_t>(states));
        col.avg_rates = Eigen::VectorXd::Zero(users);
        double bound = 0.0;
        inner_ok = true;
        for (int n = 0; n < states; ++n) {
            const auto sn = static_cast<std::size_t>(n);
            auto p2 = solve_p2(channels.state(n), profiles, mu, config, &delta[sn], &q_seed[sn]);
            const double prob = channels.probability(n);
            inner_ok = inner_ok && p2.status == SolveStatus::converged;
            bound += prob * p2.dual_bound;
            col.power += prob * p2.q.sum();
            col.avg_rates += prob * p2.rates;
            delta[sn] = p2.delta;
            q_seed[sn] = p2.q;
            col.q[sn] = std::move(p2.q);
            col.rates[sn] = std::move(p2.rates);
            col.order[sn] = std::move(p2.order);
        }
        for (int k : ndc) bound += mu(k) * targets(k);
        if (bound > best_bound) {
            best_bound = bound;
            best_mu = mu;
        }
        for (int k = 0; k < users; ++k) {
            result.trace.push_back({iter, k, mu(k), col.avg_rates(k), col.power});
        }

        Eigen::VectorXd achieved(ndc_count);
        for (Eigen::Index i = 0; i < ndc_count; ++i) achieved(i) = col.avg_rates(ndc[static_cast<std::size_t>(i)]);
        const double col_power = col.power;
        columns.push_back(std::move(col));
        if (static_cast<int>(columns.size()) > config.columns) columns.pop_front();

        const auto n_cols = static_cast<Eigen::Index>(columns.size());
        Eigen::VectorXd costs(n_cols);
        Eigen::MatrixXd rates(ndc_count, n_cols);
        for (Eigen::Index j = 0; j < n_cols; ++j) {
            const auto& c = columns[static_cast<std::size_t>(j)];
            costs(j) = c.power;
            for (Eigen::Index i = 0; i < ndc_count; ++i) rates(i, j) = c.avg_rates(ndc[static_cast<std::size_t>(i)]);
        }
        mixture = detail::solve_mixture_lp(costs, rates, ndc_floor);
        if (mixture.feasible && mixture.cost - best_bound <= config.gap_tol * (1.0 + std::abs(mixture.cost))) {
            converged = inner_ok;
            ++iter;
            break;
        }
        if (ndc_count == 0) {
            ++iter;
            break;
        }
        search.report(col_power, achieved, bound);
    }

    auto& alloc = result.allocation;
    alloc.q.assign(static_cast<std::size_t>(states), PowerVector::Zero(users));
    alloc.rates.assign(static_cast<std::size_t>(states), RateVector::Zero(users));
    alloc.order.assign(static_cast<std::size_t>(states), DecodingOrder::identity(users));
    alloc.average_rates = Eigen::VectorXd::Zero(users);
    Eigen::Index dominant = 0;
    for (Eigen::Index j = 0; j < mixture.weights.size(); ++j) {
        const double w = mixture.weights(j);
        if (w > mixture.weights(dominant)) dominant = j;
        if (w <= 0.0) continue;
        const auto& c = columns[static_cast<std::size_t>(j)];
        for (int n = 0; n < states; ++n) {
            const auto sn = static_cast<std::size_t>(n);
            alloc.q[sn] += w * c.q[sn];
            alloc.rates[sn] += w * c.rates[sn];
        }
    }
    alloc.order = columns[static_cast<std::size_t>(dominant)].order;
    for (int n = 0; n < states; ++n) {
        const auto sn = static_cast<std::size_t>(n);
        alloc.average_power += channels.probability(n) * alloc.q[sn].sum();
        alloc.average_rates += channels.probability(n) * alloc.rates[sn];
    }

    result.dual.mu = best_mu;
    result.dual.delta = std::move(delta);
    result.dual_bound = best_bound;
    result.duality_gap = alloc.average_power - best_bound;
    result.iterations = iter;
    result.status = converged ? SolveStatus::converged : SolveStatus::max_iterations;
    return result;
}

DualEvaluation evaluate_dual(const ChannelSet& channels, std::span<const UserProfile> profile_list,
                             const Eigen::VectorXd& mu, const SolverConfig& config) {
    const int users = channels.users();
    const auto profiles = indexed_profiles(profile_list, users);
    if (mu.size() != users) {
        throw DimensionError("evaluate_dual: mu needs one entry per user");
    }
    DualEvaluation out;
    out.avg_rates = Eigen::VectorXd::Zero(users);
    for (int n = 0; n < channels.size(); ++n) {
        const auto p2 = solve_p2(channels.state(n), profiles, mu, config);
        out.value += channels.probability(n) * p2.dual_bound;
        out.avg_rates += channels.probability(n) * p2.rates;
    }
    for (const auto& p : profiles) {
        if (p.traffic == TrafficClass::ndc) out.value += mu(p.user_id) * p.target_rate;
    }
    return out;
}

bool subgradient_certificate(const Eigen::VectorXd& theta, const Eigen::VectorXd& mu, double g_theta,
                             double g_mu, const Eigen::VectorXd& avg_rates_at_mu,
                             const Eigen::VectorXd& targets, double tol) {
    if (theta.size() != mu.size() || mu.size() != avg_rates_at_mu.size() || mu.size() != targets.size()) {
        throw DimensionError("subgradient_certificate: length mismatch");
    }
    const double linear = g_mu + (theta - mu).dot(targets - avg_rates_at_mu);
    return g_theta <= linear + tol * (1.0 + std::abs(linear));
}

OnlineState online_init(std::span<const UserProfile> profile_list, const SolverConfig& config) {
    const auto users = static_cast<int>(profile_list.size());
    const auto profiles = indexed_profiles(profile_list, users);
    OnlineState state;
    state.mu = Eigen::VectorXd::Zero(users);
    state.rbar = Eigen::VectorXd::Zero(users);
    for (const auto& p : profiles) {
        if (p.traffic == TrafficClass::ndc) state.mu(p.user_id) = config.mu_init;
    }
    return state;
}

OnlineStep online_step(const ChannelMatrix& h, std::span<const UserProfile> profile_list, OnlineState& state,
                       const SolverConfig& config) {
    const auto users = static_cast<int>(h.rows());
    const auto profiles = indexed_profiles(profile_list, users);
    if (state.mu.size() != users || state.rbar.size() != users) {
        throw DimensionError("online_step: state does not match the number of users");
    }
    Eigen::VectorXd targets(users);
    for (int k = 0; k < users; ++k) targets(k) = profiles[static_cast<std::size_t>(k)].target_rate;

    const Eigen::VectorXd stepped = mu_update(state.mu, targets, state.rbar, config.step_mu);
    for (const auto& p : profiles) {
        if (p.traffic == TrafficClass::ndc) state.mu(p.user_id) = stepped(p.user_id);
    }
    // DC multipliers restart from their initial value in every block.
    auto p2 = solve_p2(h, profiles, state.mu, config);

    OnlineStep out;
    out.rates = p2.rates;
    out.q = p2.q;
    out.inner_status = p2.status;
    state.rbar = rate_average(state.rbar, p2.rates, config.eps);
    ++state.t;
    return out;
}

P3Solution weighted_sum_rate(const ChannelMatrix& h, const WeightVector& weights, double power_budget,
                             const P3Config& config) {
    if (weights.size() != h.rows()) {
        throw DimensionError("weighted_sum_rate: one weight per user");
    }
    if (!(power_budget >= 0.0)) {
        throw DimensionError("weighted_sum_rate: power budget must be nonnegative");
    }
    const double top = weights.maxCoeff();
    if (!(top > 0.0) || power_budget == 0.0 || h.squaredNorm() == 0.0) {
        return solve_p3(h, WeightVector::Zero(h.rows()), config);
    }
    // Scale s turns weights into power prices: beta = s * w / max(w).
    const WeightVector unit = weights / top;
    auto spend = [&](double scale, P3Solution& out, const PowerVector* warm) {
        out = solve_p3(h, scale * unit, config, warm);
        return out.q.sum();
    };
    P3Solution lo_sol, hi_sol;
    double lo = 0.0;
    double hi = 1.0;
    while (spend(hi, hi_sol, nullptr) < power_budget) {
        lo = hi;
        lo_sol = hi_sol;
        hi *= 2.0;
        if (hi > 1e15) break;
    }
    P3Solution mid_sol = hi_sol;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double p = spend(mid, mid_sol, &hi_sol.q);
        if (std::abs(p - power_budget) <= 1e-10 * (1.0 + power_budget)) return mid_sol;
        if (p < power_budget) {
            lo = mid;
        } else {
            hi = mid;
            hi_sol = mid_sol;
        }
        if (hi - lo <= 1e-15 * hi) break;
    }
    return hi_sol;
}

RateVector pfs_step(const ChannelMatrix& h, PfsState& state, double power_budget, const SolverConfig& config) {
    const auto users = h.rows();
    if (state.rbar.size() == 0) state.rbar = Eigen::VectorXd::Zero(users);
    if (state.rbar.size() != users) {
        throw DimensionError("pfs_step: state does not match the number of users");
    }
    const WeightVector weights = state.rbar.cwiseMax(1e-6).cwiseInverse();
    const auto sol = weighted_sum_rate(h, weights, power_budget, config.p3);
    state.rbar = rate_average(state.rbar, sol.rates, config.eps);
    ++state.t;
    return sol.rates;
}

}  // namespace misobc
