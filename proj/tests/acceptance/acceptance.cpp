// Acceptance checks, one line per criterion. Usage: acceptance [1-9 ...]
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "misobc/baselines.hpp"
#include "misobc/error.hpp"
#include "misobc/experiments.hpp"
#include "misobc/fading.hpp"
#include "misobc/macregion.hpp"
#include "misobc/scenario.hpp"
#include "misobc/scheduler.hpp"
#include "misobc/throughput.hpp"
#include "misobc/wsolver.hpp"

using namespace misobc;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// Weighted objective evaluated with plain determinants, for the grid oracle.
double oracle_objective(const ChannelMatrix& h, const Eigen::VectorXd& q, const Eigen::VectorXd& beta) {
    const int k = static_cast<int>(h.rows());
    std::vector<int> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return beta(a) > beta(b); });
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(h.cols(), h.cols());
    double value = q.sum();
    for (int p = 0; p < k; ++p) {
        const int u = order[static_cast<std::size_t>(p)];
        a += q(u) * h.row(u).adjoint() * h.row(u);
        const double next = p + 1 < k ? beta(order[static_cast<std::size_t>(p + 1)]) : 0.0;
        value -= (beta(u) - next) * std::log2(std::abs(a.determinant()));
    }
    return value;
}

// Minimum over the grid {0, step, ..., hi}^K for K <= 2. Rows of the 2-D grid
// are convex sequences, so each row minimum is found by discrete ternary search.
double grid_minimum(const ChannelMatrix& h, const Eigen::VectorXd& beta, double step, double hi) {
    const int points = static_cast<int>(std::lround(hi / step)) + 1;
    Eigen::VectorXd q = Eigen::VectorXd::Zero(h.rows());
    auto eval1 = [&](int i) {
        q(0) = i * step;
        return oracle_objective(h, q, beta);
    };
    auto row_min = [&](const std::function<double(int)>& f) {
        int lo = 0, up = points - 1;
        while (up - lo > 2) {
            const int m1 = lo + (up - lo) / 3;
            const int m2 = up - (up - lo) / 3;
            if (f(m1) <= f(m2)) {
                up = m2;
            } else {
                lo = m1;
            }
        }
        double best = f(lo);
        for (int i = lo + 1; i <= up; ++i) best = std::min(best, f(i));
        return best;
    };
    if (h.rows() == 1) return row_min(eval1);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < points; ++i) {
        q(0) = i * step;
        best = std::min(best, row_min([&](int j) {
                            q(1) = j * step;
                            return oracle_objective(h, q, beta);
                        }));
    }
    return best;
}

Outcome criterion1() {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> w(0.3, 3.0);
    double worst_gap = 0.0, worst_kkt = 0.0;
    bool below_grid = true;
    for (int i = 0; i < 50; ++i) {
        const int k = 1 + i % 2;
        const int m = 1 + (i / 2) % 2;
        const auto h = generate(FadingSpec::symmetric(k, m, 1, 5000 + i)).state(0);
        Eigen::VectorXd beta(k);
        for (int u = 0; u < k; ++u) beta(u) = w(rng);
        P3Config cfg;
        cfg.kkt_tol = 1e-9;
        cfg.bisect_tol = 1e-13;
        cfg.root_tol = 1e-11;
        const auto sol = solve_p3(h, beta, cfg);
        const double grid = grid_minimum(h, beta, 1e-3, 10.0);
        worst_gap = std::max(worst_gap, std::abs(sol.objective - grid));
        worst_kkt = std::max(worst_kkt, kkt_residual(h, sol.q, beta));
        if (sol.objective > grid + 1e-12) below_grid = false;
    }
    return {worst_gap <= 1e-3 && worst_kkt <= 1e-8 && below_grid,
            fmt("max |solver - grid| = %.2e, max KKT residual = %.2e", worst_gap, worst_kkt)};
}

Outcome criterion2() {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    int failures = 0;
    double worst_order = 0.0;
    for (int i = 0; i < 200; ++i) {
        const int k = 1 + i % 6;
        const int m = 1 + (i / 6) % 4;
        const auto h = generate(FadingSpec::symmetric(k, m, 1, 9000 + i)).state(0);
        Eigen::VectorXd q(k);
        for (int j = 0; j < k; ++j) q(j) = u(rng);
        std::vector<int> perm(static_cast<std::size_t>(k));
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        const auto r = corner_rates(h, q, DecodingOrder(perm));
        for (unsigned mask = 1; mask < (1u << k); ++mask) {
            Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(m, m);
            double lhs = 0.0;
            for (int j = 0; j < k; ++j) {
                if (mask & (1u << j)) {
                    a += q(j) * h.row(j).adjoint() * h.row(j);
                    lhs += r(j);
                }
            }
            if (lhs > std::log2(std::abs(a.determinant())) + 1e-9) ++failures;
        }
        std::shuffle(perm.begin(), perm.end(), rng);
        const auto r2 = corner_rates(h, q, DecodingOrder(perm));
        worst_order = std::max(worst_order, std::abs(r.sum() - r2.sum()));
    }
    return {failures == 0 && worst_order <= 1e-10,
            fmt("subset violations = %.0f, max sum-rate order difference = %.2e", failures, worst_order)};
}

// Weak-duality bound at mu: every state's DC multipliers come from the inner
// loop, and any nonnegative choice gives a valid lower bound.
double independent_bound(const ChannelSet& set, const std::vector<UserProfile>& profiles, const Eigen::VectorXd& mu,
                         const SolverConfig& cfg) {
    double bound = 0.0;
    for (const auto& p : profiles) {
        if (p.traffic == TrafficClass::ndc) bound += mu(p.user_id) * p.target_rate;
    }
    for (int n = 0; n < set.size(); ++n) {
        const auto p2 = solve_p2(set.state(n), profiles, mu, cfg);
        Eigen::VectorXd beta(set.users());
        double shift = 0.0;
        for (const auto& p : profiles) {
            const int k = p.user_id;
            if (p.traffic == TrafficClass::ndc) {
                beta(k) = mu(k);
            } else {
                beta(k) = p2.delta(k);
                shift += p2.delta(k) * p.target_rate;
            }
        }
        P3Config tight = cfg.p3;
        bound += set.probability(n) * (solve_p3(set.state(n), beta, tight).objective + shift);
    }
    return bound;
}

Outcome criterion3() {
    const SolverConfig cfg;
    double worst = 0.0, worst_violation = 0.0;
    int converged = 0;
    for (int i = 0; i < 20; ++i) {
        const int k = 2 + i % 2;
        const int m = 1 + i % 3;
        const int n = 3 + i % 6;
        const auto set = generate(FadingSpec::symmetric(k, m, n, 300 + i));
        const auto profiles = mixed_profiles(k, 0.3 + 0.02 * i, 1.0 + 0.1 * i);
        const auto r = solve_p1_offline(set, profiles, cfg);
        if (r.status == SolveStatus::converged) ++converged;
        const double bound = independent_bound(set, profiles, r.dual.mu, cfg);
        worst = std::max(worst, r.allocation.average_power - bound);
        for (const auto& p : profiles) {
            const int u = p.user_id;
            if (p.traffic == TrafficClass::ndc) {
                worst_violation = std::max(worst_violation, p.target_rate - r.allocation.average_rates(u));
            } else {
                for (const auto& rates : r.allocation.rates) {
                    worst_violation = std::max(worst_violation, p.target_rate - rates(u));
                }
            }
        }
        for (int s = 0; s < n; ++s) {
            const auto ss = static_cast<std::size_t>(s);
            if (!in_region(set.state(s), r.allocation.q[ss], r.allocation.rates[ss], 1e-7)) worst_violation = 1.0;
        }
    }
    return {converged == 20 && worst <= 1e-2 && worst_violation <= 1e-4,
            fmt("max (power - independent dual bound) = %.2e, max target shortfall = %.2e, converged %.0f/20",
                worst, worst_violation, converged)};
}

Outcome criterion4() {
    const auto profiles = std::vector<UserProfile>{{0, TrafficClass::ndc, 3.0}, {1, TrafficClass::ndc, 1.0}};
    SolverConfig cfg;
    cfg.step_mu = 0.01;
    cfg.eps = 0.01;
    auto final_rates = [&](std::uint64_t seed, double* tail0 = nullptr) {
        const auto rows = run_online(FadingSpec::symmetric(2, 4, 1, seed), profiles, 3000, cfg);
        if (tail0 != nullptr) {
            double acc = 0.0;
            for (std::size_t i = 2000; i < rows.size(); i += 2) acc += rows[i].rbar;
            *tail0 = acc / static_cast<double>((rows.size() - 2000) / 2);
        }
        return std::make_pair(rows[rows.size() - 2].rbar, rows.back().rbar);
    };
    auto meets = [](const std::pair<double, double>& r) {
        return std::abs(r.first - 3.0) <= 0.1 && std::abs(r.second - 1.0) <= 0.1;
    };
    // The criterion is a single run; seed 1 is the configured Fig. 7 seed.
    double tail = 0.0;
    const auto main_run = final_rates(1, &tail);
    // Diagnostics: Rbar keeps fluctuating (std ~ sqrt(eps/2) times the per-block rate spread).
    int passes = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) passes += meets(final_rates(seed)) ? 1 : 0;
    return {meets(main_run), fmt("Rbar[3000] = (%.4f, %.4f) against targets (3, 1)", main_run.first,
                                 main_run.second) +
                                 fmt("; user-1 mean over blocks 1001-3000 = %.4f; criterion met on %.0f/20 seeds",
                                     tail, passes)};
}

Outcome criterion5() {
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);
    bool dominance = true, symmetry = true;
    int zf_wins_high = 0, tdma_wins_low = 0;
    double worst_excess = -std::numeric_limits<double>::infinity();
    int failures = 0;
    std::string misses;
    for (double sum_rate : {6.0, 2.0}) {
        MixedTrafficOptions m;
        m.seeds = seeds;
        m.sum_rate = sum_rate;
        m.states = 100;
        const auto rows = run_mixed_traffic(m, "acc");
        for (const auto& r : rows) {
            if (r.metric.find(':') != std::string::npos) ++failures;
        }
        for (const auto& r : rows) {
            if (r.metric != "proposed" || r.seed < 0) continue;
            for (const char* other : {"tdma", "zf"}) {
                for (const auto& o : rows) {
                    if (o.metric == other && o.seed == r.seed && o.param == r.param) {
                        worst_excess = std::max(worst_excess, r.value - o.value);
                        if (r.value > o.value + 1e-2) dominance = false;
                    }
                }
            }
        }
        for (double g : m.gammas) {
            const double tdma = mean_of(rows, g, "tdma"), zf = mean_of(rows, g, "zf");
            if (sum_rate == 6.0 && zf <= tdma) ++zf_wins_high;
            if (sum_rate == 2.0 && tdma <= zf) ++tdma_wins_low;
            if ((sum_rate == 6.0) != (zf <= tdma)) {
                misses += fmt(" [%g bits, g=%.1f: ", sum_rate, g) + fmt("TDMA %.2f, ZF %.2f]", tdma, zf);
            }
            if (g < 0.5 - 1e-9) {
                const double mirror = 1.0 - g;
                for (const char* metric : {"proposed", "tdma", "zf"}) {
                    if (mean_of(rows, g, metric) < mean_of(rows, mirror, metric) - 1e-2) symmetry = false;
                }
            }
        }
    }
    const bool pass = failures == 0 && dominance && symmetry && zf_wins_high >= 7 && tdma_wins_low >= 7;
    return {pass, fmt("max(proposed - baseline) = %.2e, ZF<=TDMA at 6 bits: %.0f/9, TDMA<=ZF at 2 bits: %.0f/9",
                      worst_excess, zf_wins_high, tdma_wins_low) +
                      (symmetry ? ", power(g) >= power(1-g) holds" : ", power(g) >= power(1-g) FAILS") +
                      (failures ? ", some points failed" : "") + (misses.empty() ? "" : "; ordering misses:" + misses)};
}

Outcome criterion6() {
    TradeoffOptions t;
    const auto rows = run_tradeoff(t, "acc");
    auto value = [&](double p, const std::string& metric) {
        for (const auto& r : rows) {
            if (r.param == p && r.metric == metric) return r.value;
        }
        return std::nan("");
    };
    bool ce_ge_cd = true, k4_ge_k2 = true;
    for (double p : t.p_stars) {
        for (const char* tag : {"_K2", "_K4"}) {
            if (value(p, std::string("C_e") + tag) < value(p, std::string("C_d") + tag) - 1e-3) ce_ge_cd = false;
        }
        if (value(p, "C_e_K4") < value(p, "C_e_K2") - 1e-3 || value(p, "C_d_K4") < value(p, "C_d_K2") - 1e-3) {
            k4_ge_k2 = false;
        }
    }
    const double ratio2 = value(10.0, "penalty_K2") / value(10.0, "C_e_K2");
    const double ratio4 = value(10.0, "penalty_K4") / value(10.0, "C_e_K4");
    const bool pass = ce_ge_cd && k4_ge_k2 && ratio2 <= 0.25 && ratio4 <= 0.25;
    return {pass, fmt("penalty/C_e at p*=10: K=2 %.3f, K=4 %.3f; C_e(K=4, 10) = %.3f", ratio2, ratio4,
                      value(10.0, "C_e_K4")) +
                      (ce_ge_cd ? ", C_e >= C_d" : ", C_e < C_d somewhere") +
                      (k4_ge_k2 ? ", K=4 >= K=2" : ", K=4 < K=2 somewhere")};
}

Outcome criterion7() {
    const auto rho = estimate_rho(FadingSpec::symmetric(1, 4, 1, 77), 2000000);
    bool pass = true;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (int k : {4, 8, 16}) {
        const int states = k == 16 ? 10 : 50;
        const auto set = generate(FadingSpec::symmetric(k, 4, states, 700 + static_cast<std::uint64_t>(k)));
        const RateProfile alpha = Eigen::VectorXd::Constant(k, 1.0 / k);
        for (double p : {5.0, 10.0}) {
            const double cd = throughput(set, alpha, p, ThroughputMode::delay_limited, SolverConfig{});
            const double bound = theorem_bound(p, k, rho.value) + 3.0 * rho.std_error;
            worst_margin = std::min(worst_margin, bound - cd);
            if (cd > bound) pass = false;
        }
    }
    const double limit = theorem_bound(10.0, 1000000, 1.0);
    const bool limit_ok = std::abs(limit - 14.4266) <= 1e-3 &&
                          std::abs(limit - 10.0 / (1.0 * std::numbers::ln2)) <= 1e-3;
    return {pass && limit_ok, fmt("rho = %.5f +- %.1e, min(bound - C_d) = %.3f", rho.value, rho.std_error,
                                  worst_margin) +
                                  fmt(", bound(10, 1e6, 1) = %.4f", limit)};
}

Outcome criterion8() {
    FairnessOptions f;
    const auto rows = run_fairness(f, "acc");
    std::vector<double> phis, sym, asym;
    for (const auto& r : rows) {
        if (r.metric == "C_e_symmetric") {
            phis.push_back(r.param);
            sym.push_back(r.value);
        } else if (r.metric == "C_e_asymmetric") {
            asym.push_back(r.value);
        }
    }
    const double tol = 2.0 * f.throughput.tol;
    const double arg_sym = plateau_argmax(phis, sym, tol);
    const double arg_asym = plateau_argmax(phis, asym, tol);
    auto at = [&](const std::vector<double>& v, double phi) {
        for (std::size_t i = 0; i < phis.size(); ++i) {
            if (std::abs(phis[i] - phi) < 1e-9) return v[i];
        }
        return std::nan("");
    };
    const double gain = at(asym, 0.7) - at(asym, 0.5);
    const bool pass = std::abs(arg_sym - 0.5) <= 0.05 + 1e-9 && std::abs(arg_asym - 0.7) <= 0.1 + 1e-9 &&
                      gain > 0.0 && gain < 1.0;
    return {pass, fmt("argmax symmetric = %.3f, asymmetric = %.3f, C_e(0.7) - C_e(0.5) = %.3f", arg_sym, arg_asym,
                      gain)};
}

Outcome criterion9() {
    // Supergradient inequality of the dual function on sampled multiplier pairs.
    const auto set = generate(FadingSpec::symmetric(3, 2, 6, 4242));
    const std::vector<UserProfile> profiles = {
        {0, TrafficClass::ndc, 0.7}, {1, TrafficClass::ndc, 1.2}, {2, TrafficClass::ndc, 0.4}};
    Eigen::VectorXd targets(3);
    targets << 0.7, 1.2, 0.4;
    const SolverConfig cfg;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 6.0);
    int holds = 0;
    for (int i = 0; i < 100; ++i) {
        Eigen::VectorXd mu(3), theta(3);
        for (int k = 0; k < 3; ++k) {
            mu(k) = u(rng);
            theta(k) = u(rng);
        }
        const auto gm = evaluate_dual(set, profiles, mu, cfg);
        const auto gt = evaluate_dual(set, profiles, theta, cfg);
        if (subgradient_certificate(theta, mu, gt.value, gm.value, gm.avg_rates, targets)) ++holds;
    }

    // Water-filling against a fine water-level scan.
    double worst_wf = 0.0;
    for (int i = 0; i < 10; ++i) {
        std::vector<double> g, p;
        std::exponential_distribution<double> e(1.0);
        for (int n = 0; n < 6; ++n) {
            g.push_back(e(rng) + 0.01);
            p.push_back(1.0 / 6.0);
        }
        const double target = 0.5 + 0.2 * i;
        const double lib = waterfill_power(g, p, target).average_power;
        // Rate is increasing in the level: bisect to 1e-12 on a separate parametrization.
        auto rate_at = [&](double level) {
            double r = 0.0;
            for (std::size_t n = 0; n < g.size(); ++n) r += p[n] * std::max(0.0, std::log2(level * g[n]));
            return r;
        };
        double lo = 0.0, hi = 1.0;
        while (rate_at(hi) < target) hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (rate_at(mid) < target ? lo : hi) = mid;
        }
        double power = 0.0;
        for (std::size_t n = 0; n < g.size(); ++n) power += p[n] * std::max(0.0, hi - 1.0 / g[n]);
        worst_wf = std::max(worst_wf, std::abs(power - lib));
    }

    // Zero-forcing orthogonality.
    double worst_zf = 0.0;
    const auto zset = generate(FadingSpec::symmetric(4, 4, 50, 31));
    for (const auto& h : zset.states()) {
        const auto pre = zf_precoders(h);
        for (int k = 0; k < 4; ++k) {
            for (int j = 0; j < 4; ++j) {
                if (j != k) worst_zf = std::max(worst_zf, std::abs((h.row(j) * pre.beams.col(k))(0)));
            }
        }
    }
    return {holds == 100 && worst_wf <= 1e-4 && worst_zf <= 1e-10,
            fmt("dual inequality %.0f/100, water-filling error %.1e, ZF residual %.1e", holds, worst_wf, worst_zf)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3,
                                                            criterion4, criterion5, criterion6,
                                                            criterion7, criterion8, criterion9};
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        const int c = std::atoi(argv[i]);
        if (c < 1 || c > 9) {
            std::fprintf(stderr, "criterion must be 1..9, got %s\n", argv[i]);
            return 2;
        }
        selected.push_back(c);
    }
    if (selected.empty()) {
        for (int c = 1; c <= 9; ++c) selected.push_back(c);
    }
    bool all = true;
    for (int c : selected) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[static_cast<std::size_t>(c - 1)]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %d: %s (%.1fs) %s\n", c, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
