#include "misobc/experiments.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "misobc/baselines.hpp"
#include "misobc/scenario.hpp"

namespace misobc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

std::vector<double> default_phis() {
    std::vector<double> phis;
    for (int i = 1; i <= 19; ++i) phis.push_back(0.05 * i);
    return phis;
}

}  // namespace

std::string result_csv_header() { return "experiment,param,metric,value,seed"; }

std::string result_csv_line(const ResultRow& row) {
    return row.experiment + ',' + format_double(row.param) + ',' + row.metric + ',' + format_double(row.value) +
           ',' + std::to_string(row.seed);
}

CsvAppender::CsvAppender(std::ostream& os, bool header) : os_(os) {
    if (header) os_ << result_csv_header() << '\n';
}

void CsvAppender::append(const std::vector<ResultRow>& rows) {
    std::lock_guard lock(mutex_);
    for (const auto& r : rows) os_ << result_csv_line(r) << '\n';
    os_.flush();
}

void parallel_for(int count, const std::function<void(int)>& body, int threads) {
    if (count <= 0) return;
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

double mean_of(const std::vector<ResultRow>& rows, double param, const std::string& metric) {
    double sum = 0.0;
    int n = 0;
    for (const auto& r : rows) {
        if (r.metric == metric && r.param == param && r.seed >= 0 && !std::isnan(r.value)) {
            sum += r.value;
            ++n;
        }
    }
    return n > 0 ? sum / n : kNaN;
}

std::vector<ResultRow> run_mixed_traffic(const MixedTrafficOptions& opts, const std::string& id) {
    const auto n_gamma = static_cast<int>(opts.gammas.size());
    const auto n_seed = static_cast<int>(opts.seeds.size());
    std::vector<std::vector<ResultRow>> cells(static_cast<std::size_t>(n_gamma * n_seed));

    parallel_for(
        n_gamma * n_seed,
        [&](int idx) {
            const double gamma = opts.gammas[static_cast<std::size_t>(idx / n_seed)];
            const auto seed = opts.seeds[static_cast<std::size_t>(idx % n_seed)];
            const auto channels =
                generate(FadingSpec::symmetric(opts.users, opts.antennas, opts.states, seed));
            const auto profiles = mixed_profiles(opts.users, gamma, opts.sum_rate);
            auto& out = cells[static_cast<std::size_t>(idx)];
            const auto s = static_cast<std::int64_t>(seed);
            auto record = [&](const std::string& metric, const std::function<double()>& f) {
                try {
                    out.push_back({id, gamma, metric, f(), s});
                } catch (const InfeasibleError&) {
                    out.push_back({id, gamma, metric + ":infeasible", kNaN, s});
                } catch (const UnsupportedError&) {
                    out.push_back({id, gamma, metric + ":error", kNaN, s});
                }
            };
            record("proposed",
                   [&] { return solve_p1_offline(channels, profiles, opts.solver).allocation.average_power; });
            record("tdma", [&] { return tdma_power(channels, profiles); });
            record("zf", [&] { return zf_sdma_power(channels, profiles); });
        },
        opts.threads);

    std::vector<ResultRow> rows;
    for (const auto& c : cells) rows.insert(rows.end(), c.begin(), c.end());
    for (double gamma : opts.gammas) {
        for (const char* metric : {"proposed", "tdma", "zf"}) {
            rows.push_back({id, gamma, std::string(metric) + "_mean", mean_of(rows, gamma, metric), -1});
        }
    }
    return rows;
}

std::string online_csv_header() { return "t,user,rbar,mu,rate,power"; }

std::string online_csv_line(const OnlineRow& r) {
    return std::to_string(r.t) + ',' + std::to_string(r.user) + ',' + format_double(r.rbar) + ',' +
           format_double(r.mu) + ',' + format_double(r.rate) + ',' + format_double(r.power);
}

std::vector<OnlineRow> run_online(const FadingSpec& spec, std::span<const UserProfile> profiles, int blocks,
                                  const SolverConfig& config) {
    std::vector<OnlineRow> rows;
    if (blocks <= 0) return rows;
    FadingSpec draw = spec;
    draw.states = blocks;
    const auto channels = generate(draw);
    auto state = online_init(profiles, config);
    const int users = channels.users();
    rows.reserve(static_cast<std::size_t>(blocks * users));
    for (int t = 0; t < blocks; ++t) {
        const auto step = online_step(channels.state(t), profiles, state, config);
        for (int k = 0; k < users; ++k) {
            rows.push_back({t + 1, k, state.rbar(k), state.mu(k), step.rates(k), step.q(k)});
        }
    }
    return rows;
}

std::vector<ResultRow> run_tradeoff(const TradeoffOptions& opts, const std::string& id) {
    std::vector<RateProfile> networks = opts.networks;
    if (networks.empty()) {
        networks.push_back((Eigen::VectorXd(2) << 2.0 / 3.0, 1.0 / 3.0).finished());
        networks.push_back((Eigen::VectorXd(4) << 2.0 / 6.0, 2.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0).finished());
    }
    const auto n_p = static_cast<int>(opts.p_stars.size());
    const auto n_net = static_cast<int>(networks.size());
    std::vector<std::vector<ResultRow>> cells(static_cast<std::size_t>(n_p * n_net));
    parallel_for(
        n_p * n_net,
        [&](int idx) {
            const auto& alpha = networks[static_cast<std::size_t>(idx / n_p)];
            const double p = opts.p_stars[static_cast<std::size_t>(idx % n_p)];
            const auto users = static_cast<int>(alpha.size());
            const auto channels = generate(FadingSpec::symmetric(users, opts.antennas, opts.states, opts.seed));
            const auto report = delay_penalty(channels, alpha, p, opts.solver, opts.throughput);
            const std::string tag = "_K" + std::to_string(users);
            const auto s = static_cast<std::int64_t>(opts.seed);
            cells[static_cast<std::size_t>(idx)] = {{id, p, "C_e" + tag, report.c_e, s},
                                                    {id, p, "C_d" + tag, report.c_d, s},
                                                    {id, p, "penalty" + tag, report.delay_penalty, s}};
        },
        opts.threads);
    std::vector<ResultRow> rows;
    for (const auto& c : cells) rows.insert(rows.end(), c.begin(), c.end());
    return rows;
}

std::vector<ResultRow> run_fairness(const FairnessOptions& opts, const std::string& id) {
    const std::vector<double> phis = opts.phis.empty() ? default_phis() : opts.phis;
    const std::vector<std::pair<std::string, std::vector<double>>> cases = {
        {"symmetric", opts.symmetric_variances}, {"asymmetric", opts.asymmetric_variances}};
    std::vector<ChannelSet> channels;
    for (const auto& [name, variances] : cases) {
        FadingSpec spec;
        spec.users = static_cast<int>(variances.size());
        spec.antennas = opts.antennas;
        spec.variances = variances;
        spec.states = opts.states;
        spec.seed = opts.seed;
        channels.push_back(generate(spec));
    }
    const auto n_phi = static_cast<int>(phis.size());
    const auto n_case = static_cast<int>(cases.size());
    // One extra task per case for the sum capacity.
    const int per_case = n_phi + 1;
    std::vector<ResultRow> cells(static_cast<std::size_t>(per_case * n_case));
    const auto s = static_cast<std::int64_t>(opts.seed);
    parallel_for(
        per_case * n_case,
        [&](int idx) {
            const int c = idx / per_case;
            const int i = idx % per_case;
            const auto& ch = channels[static_cast<std::size_t>(c)];
            const auto& name = cases[static_cast<std::size_t>(c)].first;
            if (i == n_phi) {
                const auto cap = sum_capacity_profile(ch, opts.p_star, opts.solver.p3);
                cells[static_cast<std::size_t>(idx)] = {id, cap.alpha(0), "C_sum_" + name, cap.value, s};
                return;
            }
            const double phi = phis[static_cast<std::size_t>(i)];
            const RateProfile alpha = (Eigen::VectorXd(2) << phi, 1.0 - phi).finished();
            const double ce = throughput(ch, alpha, opts.p_star, ThroughputMode::expected, opts.solver,
                                         opts.throughput);
            cells[static_cast<std::size_t>(idx)] = {id, phi, "C_e_" + name, ce, s};
        },
        opts.threads);
    return cells;
}

double plateau_argmax(const std::vector<double>& grid, const std::vector<double>& values, double tol) {
    if (grid.empty() || grid.size() != values.size()) {
        throw DimensionError("plateau_argmax: grid and values must have equal nonzero length");
    }
    double best = values[0];
    for (double v : values) best = std::max(best, v);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (values[i] >= best - tol) {
            lo = std::min(lo, grid[i]);
            hi = std::max(hi, grid[i]);
        }
    }
    return 0.5 * (lo + hi);
}

void repro(const std::string& figure, const ReproOptions& opts, std::ostream& os) {
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < opts.seeds; ++i) seeds.push_back(opts.seed + static_cast<std::uint64_t>(i));

    if (figure == "fig5" || figure == "fig6") {
        MixedTrafficOptions m;
        m.seeds = seeds;
        m.sum_rate = figure == "fig5" ? 6.0 : 2.0;
        if (opts.states > 0) m.states = opts.states;
        m.threads = opts.threads;
        CsvAppender(os).append(run_mixed_traffic(m, figure));
    } else if (figure == "fig7") {
        const std::vector<UserProfile> profiles = {{0, TrafficClass::ndc, 3.0}, {1, TrafficClass::ndc, 1.0}};
        SolverConfig config;
        config.step_mu = 0.01;
        config.eps = 0.01;
        os << online_csv_header() << '\n';
        for (const auto& r : run_online(FadingSpec::symmetric(2, 4, 1, opts.seed), profiles, 3000, config)) {
            os << online_csv_line(r) << '\n';
        }
    } else if (figure == "fig9") {
        TradeoffOptions t;
        t.seed = opts.seed;
        if (opts.states > 0) t.states = opts.states;
        t.threads = opts.threads;
        CsvAppender(os).append(run_tradeoff(t, figure));
    } else if (figure == "fig10") {
        FairnessOptions f;
        f.seed = opts.seed;
        if (opts.states > 0) f.states = opts.states;
        f.threads = opts.threads;
        CsvAppender(os).append(run_fairness(f, figure));
    } else {
        throw ConfigError("unknown figure '" + figure + "' (expected fig5, fig6, fig7, fig9 or fig10)");
    }
}

}  // namespace misobc
