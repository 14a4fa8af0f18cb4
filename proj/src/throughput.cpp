#include "misobc/throughput.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "misobc/macregion.hpp"

namespace misobc {

void validate_profile(const RateProfile& alpha) {
    if (alpha.size() == 0) {
        throw DimensionError("rate profile is empty");
    }
    for (Eigen::Index k = 0; k < alpha.size(); ++k) {
        if (!(alpha(k) >= 0.0) || !std::isfinite(alpha(k))) {
            throw DimensionError("rate profile entries must be finite and nonnegative");
        }
    }
    if (std::abs(alpha.sum() - 1.0) > 1e-12) {
        throw DimensionError("rate profile must sum to 1");
    }
}

OfflineResult solve_profile(const ChannelSet& channels, const RateProfile& alpha, double r_sum,
                            ThroughputMode mode, const SolverConfig& config, DualState* warm) {
    validate_profile(alpha);
    if (alpha.size() != channels.users()) {
        throw DimensionError("rate profile length must equal the number of users");
    }
    if (!(r_sum >= 0.0)) {
        throw DimensionError("sum rate must be nonnegative");
    }
    const auto traffic = mode == ThroughputMode::expected ? TrafficClass::ndc : TrafficClass::dc;
    std::vector<UserProfile> profiles;
    for (int k = 0; k < channels.users(); ++k) profiles.push_back({k, traffic, r_sum * alpha(k)});
    auto result = solve_p1_offline(channels, profiles, config, warm);
    if (warm != nullptr) *warm = result.dual;
    return result;
}

double min_power_for_profile(const ChannelSet& channels, const RateProfile& alpha, double r_sum,
                             ThroughputMode mode, const SolverConfig& config) {
    if (r_sum == 0.0) {
        validate_profile(alpha);
        return 0.0;
    }
    return solve_profile(channels, alpha, r_sum, mode, config).allocation.average_power;
}

double throughput(const ChannelSet& channels, const RateProfile& alpha, double p_star, ThroughputMode mode,
                  const SolverConfig& config, const ThroughputConfig& tconfig) {
    if (!(p_star > 0.0)) {
        throw DimensionError("throughput: p_star must be positive");
    }
    if (!(tconfig.tol > 0.0) || !(tconfig.initial > 0.0)) {
        throw ConfigError("throughput: tolerance and initial bracket must be positive");
    }
    DualState warm;
    auto power_at = [&](double r) {
        try {
            return solve_profile(channels, alpha, r, mode, config, &warm).allocation.average_power;
        } catch (const InfeasibleError&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    double lo = 0.0;
    double hi = tconfig.initial;
    while (power_at(hi) <= p_star) {
        lo = hi;
        hi *= 2.0;
        if (hi > tconfig.max_rate) {
            throw Error("throughput: no infeasible sum rate below " + std::to_string(tconfig.max_rate));
        }
    }
    while (hi - lo > tconfig.tol) {
        const double mid = 0.5 * (lo + hi);
        if (power_at(mid) <= p_star) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

SumCapacity sum_capacity_profile(const ChannelSet& channels, double p_star, const P3Config& config) {
    if (!(p_star > 0.0)) {
        throw DimensionError("sum capacity: p_star must be positive");
    }
    const int users = channels.users();
    const int states = channels.size();
    std::vector<PowerVector> q(static_cast<std::size_t>(states), PowerVector::Zero(users));

    auto spend = [&](double price) {
        double avg = 0.0;
        const WeightVector beta = WeightVector::Constant(users, price);
        for (int n = 0; n < states; ++n) {
            const auto sn = static_cast<std::size_t>(n);
            q[sn] = solve_p3(channels.state(n), beta, config, &q[sn]).q;
            avg += channels.probability(n) * q[sn].sum();
        }
        return avg;
    };

    // Weight s on the sum rate per unit power; spent power grows with s.
    double lo = 0.0;
    double hi = 1.0;
    while (spend(hi) < p_star) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e15) throw Error("sum capacity: power price bracket failed");
    }
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double p = spend(mid);
        if (std::abs(p - p_star) <= 1e-10 * (1.0 + p_star)) {
            lo = hi = mid;
            break;
        }
        (p < p_star ? lo : hi) = mid;
        if (hi - lo <= 1e-14 * hi) break;
    }
    const double price = 0.5 * (lo + hi);
    spend(price);

    SumCapacity out;
    out.price = price;
    Eigen::VectorXd avg_rates = Eigen::VectorXd::Zero(users);
    for (int n = 0; n < states; ++n) {
        const auto& h = channels.state(n);
        const auto& qn = q[static_cast<std::size_t>(n)];
        out.value += channels.probability(n) * sum_bound(h, qn);
        for (int shift = 0; shift < users; ++shift) {
            std::vector<int> perm(static_cast<std::size_t>(users));
            for (int p = 0; p < users; ++p) perm[static_cast<std::size_t>(p)] = (p + shift) % users;
            avg_rates += (channels.probability(n) / users) * corner_rates(h, qn, DecodingOrder(perm));
        }
    }
    const double total = avg_rates.sum();
    out.alpha = total > 0.0 ? Eigen::VectorXd(avg_rates / total) : Eigen::VectorXd::Constant(users, 1.0 / users);
    return out;
}

double fairness_penalty(const ChannelSet& channels, const RateProfile& alpha_e, double p_star,
                        const SolverConfig& config, const ThroughputConfig& tconfig) {
    const double c_sum = sum_capacity_profile(channels, p_star, config.p3).value;
    return c_sum - throughput(channels, alpha_e, p_star, ThroughputMode::expected, config, tconfig);
}

double theorem_bound(double p_star, int users, double rho) {
    if (!(rho > 0.0) || users < 1 || !(p_star >= 0.0)) {
        throw DimensionError("theorem_bound: need rho > 0, K >= 1, p_star >= 0");
    }
    const double k = users;
    return k * std::log2(1.0 + p_star / (k * rho));
}

ThroughputReport delay_penalty(const ChannelSet& channels, const RateProfile& alpha, double p_star,
                               const SolverConfig& config, const ThroughputConfig& tconfig) {
    ThroughputReport r;
    r.p_star = p_star;
    r.alpha = alpha;
    r.c_e = throughput(channels, alpha, p_star, ThroughputMode::expected, config, tconfig);
    r.c_d = throughput(channels, alpha, p_star, ThroughputMode::delay_limited, config, tconfig);
    r.delay_penalty = r.c_e - r.c_d;
    return r;
}

std::string report_csv_header() {
    return "p_star,alpha,C_e,C_d,delay_penalty,fairness_penalty,theorem_bound";
}

std::string report_csv_row(const ThroughputReport& report) {
    std::ostringstream os;
    os.precision(10);
    os << report.p_star << ',';
    for (Eigen::Index k = 0; k < report.alpha.size(); ++k) {
        if (k > 0) os << ';';
        os << report.alpha(k);
    }
    os << ',' << report.c_e << ',' << report.c_d << ',' << report.delay_penalty << ',';
    if (report.fairness_penalty) os << *report.fairness_penalty;
    os << ',';
    if (report.theorem_bound) os << *report.theorem_bound;
    return os.str();
}

}  // namespace misobc
