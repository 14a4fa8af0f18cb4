// Command-line front end; uses only the C interface of libmisobc.
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "misobc/misobc.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitConfig = 4;

int exit_code(misobc_status s) {
    switch (s) {
        case MISOBC_OK: return kExitOk;
        case MISOBC_ERR_INFEASIBLE: return kExitInfeasible;
        case MISOBC_ERR_NOT_CONVERGED: return kExitNotConverged;
        case MISOBC_ERR_CONFIG:
        case MISOBC_ERR_ARGUMENT:
        case MISOBC_ERR_DIMENSION:
        case MISOBC_ERR_UNSUPPORTED: return kExitConfig;
        default: return kExitFailure;
    }
}

struct Options {
    std::string config;
    std::string out;
    long long seed = -1;
    int states = 0;
    int blocks = -1;
    int seeds = 0;
    bool quiet = false;
    std::string mode = "expected";
    std::string trace;
    std::string figure;
};

struct ScenarioDeleter {
    void operator()(misobc_scenario* s) const { misobc_scenario_free(s); }
};
struct ChannelsDeleter {
    void operator()(misobc_channel_set* c) const { misobc_channels_free(c); }
};
using ScenarioPtr = std::unique_ptr<misobc_scenario, ScenarioDeleter>;
using ChannelsPtr = std::unique_ptr<misobc_channel_set, ChannelsDeleter>;

class Failure {
public:
    explicit Failure(misobc_status s) : status(s) {}
    misobc_status status;
};

void check(misobc_status s) {
    if (s != MISOBC_OK) throw Failure(s);
}

ScenarioPtr load(const Options& o) {
    if (o.config.empty()) {
        std::fprintf(stderr, "error: --config is required for this command\n");
        throw Failure(MISOBC_ERR_CONFIG);
    }
    misobc_scenario* raw = nullptr;
    check(misobc_scenario_load(o.config.c_str(), &raw));
    ScenarioPtr s(raw);
    if (o.seed >= 0) check(misobc_scenario_set_seed(s.get(), static_cast<uint64_t>(o.seed)));
    if (o.states > 0) check(misobc_scenario_set_states(s.get(), o.states));
    if (o.blocks >= 0) check(misobc_scenario_set_blocks(s.get(), o.blocks));
    return s;
}

ChannelsPtr channels_for(const misobc_scenario* s) {
    misobc_channel_set* raw = nullptr;
    check(misobc_channels_generate(s, &raw));
    return ChannelsPtr(raw);
}

std::string output_path(const Options& o, const misobc_scenario* s) {
    if (!o.out.empty()) return o.out;
    if (s == nullptr) return {};
    char buf[4096];
    check(misobc_scenario_output_path(s, buf, sizeof buf));
    return buf;
}

int users_of(const misobc_scenario* s) {
    int k = 0;
    check(misobc_scenario_users(s, &k));
    return k;
}

void say(const Options& o, const char* fmt, double v) {
    if (!o.quiet) std::printf(fmt, v);
}

int cmd_gen(const Options& o) {
    auto s = load(o);
    auto ch = channels_for(s.get());
    const auto path = output_path(o, s.get());
    if (path.empty()) {
        std::fprintf(stderr, "error: gen needs --out or output_path in the config\n");
        return kExitConfig;
    }
    check(misobc_channels_save(ch.get(), path.c_str()));
    int k = 0, m = 0, n = 0;
    check(misobc_channels_dims(ch.get(), &k, &m, &n));
    if (!o.quiet) std::printf("wrote %d states (K=%d, M=%d) to %s\n", n, k, m, path.c_str());
    return kExitOk;
}

int cmd_solve(const Options& o) {
    auto s = load(o);
    auto ch = channels_for(s.get());
    const int k = users_of(s.get());
    std::vector<double> rates(static_cast<std::size_t>(k));
    misobc_solve_summary sum{};
    const auto path = output_path(o, s.get());
    const auto status =
        misobc_solve_offline(s.get(), ch.get(), path.empty() ? nullptr : path.c_str(), &sum, rates.data());
    if (status != MISOBC_OK && status != MISOBC_ERR_NOT_CONVERGED) throw Failure(status);
    if (!o.quiet) {
        std::printf("average_power %.8f\ndual_bound %.8f\nduality_gap %.3e\niterations %d\nconverged %d\n",
                    sum.average_power, sum.dual_bound, sum.duality_gap, sum.iterations, sum.converged);
        for (int u = 0; u < k; ++u) std::printf("avg_rate[%d] %.8f\n", u, rates[static_cast<std::size_t>(u)]);
    }
    if (status != MISOBC_OK) std::fprintf(stderr, "warning: %s\n", misobc_last_error());
    return exit_code(status);
}

int cmd_online(const Options& o) {
    auto s = load(o);
    const int k = users_of(s.get());
    std::vector<double> rbar(static_cast<std::size_t>(k));
    const auto path = output_path(o, s.get());
    check(misobc_run_online(s.get(), path.empty() ? nullptr : path.c_str(), rbar.data()));
    if (!o.quiet) {
        for (int u = 0; u < k; ++u) std::printf("final_rbar[%d] %.6f\n", u, rbar[static_cast<std::size_t>(u)]);
    }
    return kExitOk;
}

int cmd_throughput(const Options& o) {
    auto s = load(o);
    auto ch = channels_for(s.get());
    misobc_mode mode = MISOBC_MODE_EXPECTED;
    if (o.mode == "delay" || o.mode == "delay_limited") {
        mode = MISOBC_MODE_DELAY_LIMITED;
    } else if (o.mode != "expected") {
        std::fprintf(stderr, "error: --mode must be expected or delay\n");
        return kExitConfig;
    }
    double c = 0.0;
    check(misobc_throughput(s.get(), ch.get(), mode, &c));
    if (o.quiet) {
        std::printf("%.6f\n", c);
    } else {
        std::printf("throughput %.6f\n", c);
    }
    return kExitOk;
}

int cmd_penalty(const Options& o) {
    auto s = load(o);
    auto ch = channels_for(s.get());
    misobc_report r{};
    check(misobc_delay_penalty(s.get(), ch.get(), &r));
    const auto path = output_path(o, s.get());
    if (!path.empty()) {
        std::FILE* f = std::fopen(path.c_str(), "w");
        if (f == nullptr) {
            std::fprintf(stderr, "error: cannot write %s\n", path.c_str());
            return kExitFailure;
        }
        std::fprintf(f, "p_star,C_e,C_d,delay_penalty\n%.10g,%.10g,%.10g,%.10g\n", r.p_star, r.c_e, r.c_d,
                     r.delay_penalty);
        std::fclose(f);
    }
    say(o, "C_e %.6f\n", r.c_e);
    say(o, "C_d %.6f\n", r.c_d);
    say(o, "delay_penalty %.6f\n", r.delay_penalty);
    return kExitOk;
}

int cmd_fairness(const Options& o) {
    auto s = load(o);
    auto ch = channels_for(s.get());
    const int k = users_of(s.get());
    std::vector<double> alpha(static_cast<std::size_t>(k));
    double penalty = 0.0, cap = 0.0;
    check(misobc_fairness_penalty(s.get(), ch.get(), &penalty, &cap, alpha.data()));
    say(o, "sum_capacity %.6f\n", cap);
    say(o, "fairness_penalty %.6f\n", penalty);
    if (!o.quiet) {
        for (int u = 0; u < k; ++u) std::printf("alpha_star[%d] %.4f\n", u, alpha[static_cast<std::size_t>(u)]);
    }
    return kExitOk;
}

int cmd_baseline(const Options& o) {
    auto s = load(o);
    auto ch = channels_for(s.get());
    double tdma = 0.0, zf = 0.0;
    check(misobc_baselines(s.get(), ch.get(), &tdma, &zf));
    say(o, "tdma_power %.6f\n", tdma);
    if (std::isnan(zf)) {
        if (!o.quiet) std::printf("zf_power unsupported (K > M)\n");
    } else {
        say(o, "zf_power %.6f\n", zf);
    }
    return kExitOk;
}

int cmd_repro(const Options& o) {
    const std::string path = o.out.empty() ? o.figure + ".csv" : o.out;
    const uint64_t seed = o.seed >= 0 ? static_cast<uint64_t>(o.seed) : 1;
    check(misobc_repro(o.figure.c_str(), seed, o.states, o.seeds, path.c_str()));
    if (!o.quiet) std::printf("wrote %s\n", path.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic resource allocation for the fading MISO broadcast channel"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", o.config, "scenario JSON file");
        cmd->add_option("--seed", o.seed, "override the fading seed");
        cmd->add_option("--out", o.out, "output file");
        cmd->add_option("--states", o.states, "override the number of fading states");
        cmd->add_flag("--quiet", o.quiet, "print only essential output");
    };

    struct Entry {
        const char* name;
        const char* help;
        int (*run)(const Options&);
    };
    const std::vector<Entry> entries = {
        {"gen", "generate and save a channel ensemble", cmd_gen},
        {"solve", "offline minimum-power scheduling", cmd_solve},
        {"online", "online scheduler trace", cmd_online},
        {"throughput", "expected or delay-limited throughput", cmd_throughput},
        {"penalty", "delay penalty C_e - C_d", cmd_penalty},
        {"fairness", "fairness penalty against the sum capacity", cmd_fairness},
        {"baseline", "TDMA and ZF-SDMA average power", cmd_baseline},
    };
    int (*selected)(const Options&) = nullptr;
    for (const auto& e : entries) {
        auto* cmd = app.add_subcommand(e.name, e.help);
        add_common(cmd);
        if (std::string(e.name) == "online") cmd->add_option("--blocks", o.blocks, "number of blocks");
        if (std::string(e.name) == "throughput") cmd->add_option("--mode", o.mode, "expected or delay");
        cmd->callback([&selected, run = e.run] { selected = run; });
    }
    auto* repro = app.add_subcommand("repro", "reproduce a figure at desk scale");
    add_common(repro);
    repro->add_option("figure", o.figure, "fig5, fig6, fig7, fig9 or fig10")->required();
    repro->add_option("--seeds", o.seeds, "number of seeds for power comparisons");
    repro->callback([&selected] { selected = cmd_repro; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        return selected(o);
    } catch (const Failure& f) {
        std::fprintf(stderr, "error (%s): %s\n", misobc_status_string(f.status), misobc_last_error());
        return exit_code(f.status);
    }
}
