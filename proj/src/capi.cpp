#include "misobc/misobc.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "misobc/baselines.hpp"
#include "misobc/experiments.hpp"
#include "misobc/scenario.hpp"

struct misobc_scenario {
    misobc::Scenario value;
};

struct misobc_channel_set {
    misobc::ChannelSet value;
};

namespace {

thread_local std::string g_last_error;

misobc_status fail(misobc_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

// Maps library exceptions onto status codes.
template <class F>
misobc_status guarded(F&& body) {
    try {
        g_last_error.clear();
        return body();
    } catch (const misobc::InfeasibleError& e) {
        return fail(MISOBC_ERR_INFEASIBLE, e.what());
    } catch (const misobc::ConfigError& e) {
        return fail(MISOBC_ERR_CONFIG, e.what());
    } catch (const misobc::DimensionError& e) {
        return fail(MISOBC_ERR_DIMENSION, e.what());
    } catch (const misobc::UnsupportedError& e) {
        return fail(MISOBC_ERR_UNSUPPORTED, e.what());
    } catch (const misobc::CapacityError& e) {
        return fail(MISOBC_ERR_CAPACITY, e.what());
    } catch (const misobc::DivergenceError& e) {
        return fail(MISOBC_ERR_DIVERGENCE, e.what());
    } catch (const misobc::IoError& e) {
        return fail(MISOBC_ERR_IO, e.what());
    } catch (const std::exception& e) {
        return fail(MISOBC_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(MISOBC_ERR_INTERNAL, "unknown error");
    }
}

misobc_status null_argument() { return fail(MISOBC_ERR_ARGUMENT, "null argument"); }

double require_p_star(const misobc::Scenario& s) {
    if (!s.p_star) throw misobc::ConfigError("scenario has no p_star");
    return *s.p_star;
}

std::ofstream open_out(const char* path) {
    std::ofstream os(path);
    if (!os) throw misobc::IoError(std::string("cannot open ") + path + " for writing");
    return os;
}

}  // namespace

extern "C" {

const char* misobc_version(void) { return "1.0.0"; }

const char* misobc_last_error(void) { return g_last_error.c_str(); }

const char* misobc_status_string(misobc_status status) {
    switch (status) {
        case MISOBC_OK: return "ok";
        case MISOBC_ERR_ARGUMENT: return "invalid argument";
        case MISOBC_ERR_INFEASIBLE: return "infeasible";
        case MISOBC_ERR_NOT_CONVERGED: return "not converged";
        case MISOBC_ERR_CONFIG: return "configuration error";
        case MISOBC_ERR_DIMENSION: return "dimension error";
        case MISOBC_ERR_UNSUPPORTED: return "unsupported";
        case MISOBC_ERR_CAPACITY: return "capacity exceeded";
        case MISOBC_ERR_DIVERGENCE: return "divergent expectation";
        case MISOBC_ERR_IO: return "i/o error";
        case MISOBC_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

misobc_status misobc_scenario_load(const char* path, misobc_scenario** out) {
    if (path == nullptr || out == nullptr) return null_argument();
    return guarded([&] {
        *out = new misobc_scenario{misobc::load_scenario(path)};
        return MISOBC_OK;
    });
}

misobc_status misobc_scenario_parse(const char* json_text, misobc_scenario** out) {
    if (json_text == nullptr || out == nullptr) return null_argument();
    return guarded([&] {
        *out = new misobc_scenario{misobc::parse_scenario(json_text)};
        return MISOBC_OK;
    });
}

void misobc_scenario_free(misobc_scenario* scenario) { delete scenario; }

misobc_status misobc_scenario_set_seed(misobc_scenario* scenario, uint64_t seed) {
    if (scenario == nullptr) return null_argument();
    scenario->value.fading.seed = seed;
    return MISOBC_OK;
}

misobc_status misobc_scenario_set_states(misobc_scenario* scenario, int states) {
    if (scenario == nullptr) return null_argument();
    if (states < 1) return fail(MISOBC_ERR_CONFIG, "states must be at least 1");
    scenario->value.fading.states = states;
    return MISOBC_OK;
}

misobc_status misobc_scenario_set_blocks(misobc_scenario* scenario, int blocks) {
    if (scenario == nullptr) return null_argument();
    if (blocks < 0) return fail(MISOBC_ERR_CONFIG, "blocks must be nonnegative");
    scenario->value.blocks = blocks;
    return MISOBC_OK;
}

misobc_status misobc_scenario_users(const misobc_scenario* scenario, int* users) {
    if (scenario == nullptr || users == nullptr) return null_argument();
    *users = scenario->value.fading.users;
    return MISOBC_OK;
}

misobc_status misobc_scenario_output_path(const misobc_scenario* scenario, char* buf, size_t size) {
    if (scenario == nullptr || buf == nullptr || size == 0) return null_argument();
    const auto& path = scenario->value.output_path;
    if (path.size() + 1 > size) return fail(MISOBC_ERR_ARGUMENT, "buffer too small for the output path");
    std::memcpy(buf, path.c_str(), path.size() + 1);
    return MISOBC_OK;
}

misobc_status misobc_scenario_save(const misobc_scenario* scenario, const char* path) {
    if (scenario == nullptr || path == nullptr) return null_argument();
    return guarded([&] {
        auto os = open_out(path);
        os << misobc::scenario_to_json(scenario->value) << '\n';
        return MISOBC_OK;
    });
}

misobc_status misobc_channels_generate(const misobc_scenario* scenario, misobc_channel_set** out) {
    if (scenario == nullptr || out == nullptr) return null_argument();
    return guarded([&] {
        *out = new misobc_channel_set{misobc::generate(scenario->value.fading)};
        return MISOBC_OK;
    });
}

misobc_status misobc_channels_create(int users, int antennas, int states, const double* entries,
                                     const double* probs, misobc_channel_set** out) {
    if (entries == nullptr || out == nullptr) return null_argument();
    if (users < 1 || antennas < 1 || states < 1) return fail(MISOBC_ERR_DIMENSION, "K, M, N must be positive");
    return guarded([&] {
        std::vector<misobc::ChannelMatrix> mats;
        const double* p = entries;
        for (int n = 0; n < states; ++n) {
            misobc::ChannelMatrix h(users, antennas);
            for (int k = 0; k < users; ++k) {
                for (int m = 0; m < antennas; ++m, p += 2) h(k, m) = misobc::Complex(p[0], p[1]);
            }
            mats.push_back(std::move(h));
        }
        std::vector<double> pr;
        if (probs != nullptr) pr.assign(probs, probs + states);
        *out = new misobc_channel_set{misobc::ChannelSet(std::move(mats), std::move(pr))};
        return MISOBC_OK;
    });
}

misobc_status misobc_channels_load(const char* path, misobc_channel_set** out) {
    if (path == nullptr || out == nullptr) return null_argument();
    return guarded([&] {
        *out = new misobc_channel_set{misobc::ChannelSet::load(path)};
        return MISOBC_OK;
    });
}

misobc_status misobc_channels_save(const misobc_channel_set* channels, const char* path) {
    if (channels == nullptr || path == nullptr) return null_argument();
    return guarded([&] {
        channels->value.save(path);
        return MISOBC_OK;
    });
}

misobc_status misobc_channels_dims(const misobc_channel_set* channels, int* users, int* antennas, int* states) {
    if (channels == nullptr) return null_argument();
    if (users != nullptr) *users = channels->value.users();
    if (antennas != nullptr) *antennas = channels->value.antennas();
    if (states != nullptr) *states = channels->value.size();
    return MISOBC_OK;
}

void misobc_channels_free(misobc_channel_set* channels) { delete channels; }

misobc_status misobc_solve_offline(const misobc_scenario* scenario, const misobc_channel_set* channels,
                                   const char* trace_path, misobc_solve_summary* summary, double* avg_rates) {
    if (scenario == nullptr || channels == nullptr || summary == nullptr) return null_argument();
    return guarded([&] {
        const auto& s = scenario->value;
        if (s.profiles.empty()) throw misobc::ConfigError("scenario has no user profiles");
        if (channels->value.users() != s.fading.users) {
            throw misobc::DimensionError("channel set and scenario disagree on the number of users");
        }
        const auto result = misobc::solve_p1_offline(channels->value, s.profiles, s.solver);
        summary->average_power = result.allocation.average_power;
        summary->dual_bound = result.dual_bound;
        summary->duality_gap = result.duality_gap;
        summary->iterations = result.iterations;
        summary->converged = result.status == misobc::SolveStatus::converged ? 1 : 0;
        if (avg_rates != nullptr) {
            for (Eigen::Index k = 0; k < result.allocation.average_rates.size(); ++k) {
                avg_rates[k] = result.allocation.average_rates(k);
            }
        }
        if (trace_path != nullptr) {
            auto os = open_out(trace_path);
            os.precision(12);
            os << "iter,user,mu,avg_rate,power\n";
            for (const auto& r : result.trace) {
                os << r.iter << ',' << r.user << ',' << r.mu << ',' << r.avg_rate << ',' << r.power << '\n';
            }
        }
        return summary->converged ? MISOBC_OK
                                  : fail(MISOBC_ERR_NOT_CONVERGED, "offline solver hit its iteration limit");
    });
}

misobc_status misobc_run_online(const misobc_scenario* scenario, const char* trace_path, double* final_rbar) {
    if (scenario == nullptr) return null_argument();
    return guarded([&] {
        const auto& s = scenario->value;
        if (s.profiles.empty()) throw misobc::ConfigError("scenario has no user profiles");
        const auto rows = misobc::run_online(s.fading, s.profiles, s.blocks, s.solver);
        if (final_rbar != nullptr) {
            for (int k = 0; k < s.fading.users; ++k) final_rbar[k] = 0.0;
            const auto users = static_cast<std::size_t>(s.fading.users);
            if (rows.size() >= users) {
                for (std::size_t i = rows.size() - users; i < rows.size(); ++i) final_rbar[rows[i].user] = rows[i].rbar;
            }
        }
        if (trace_path != nullptr) {
            auto os = open_out(trace_path);
            os << misobc::online_csv_header() << '\n';
            for (const auto& r : rows) os << misobc::online_csv_line(r) << '\n';
        }
        return MISOBC_OK;
    });
}

misobc_status misobc_throughput(const misobc_scenario* scenario, const misobc_channel_set* channels,
                                misobc_mode mode, double* out) {
    if (scenario == nullptr || channels == nullptr || out == nullptr) return null_argument();
    return guarded([&] {
        const auto& s = scenario->value;
        const auto m = mode == MISOBC_MODE_DELAY_LIMITED ? misobc::ThroughputMode::delay_limited
                                                         : misobc::ThroughputMode::expected;
        *out = misobc::throughput(channels->value, s.rate_profile(), require_p_star(s), m, s.solver, s.throughput);
        return MISOBC_OK;
    });
}

misobc_status misobc_delay_penalty(const misobc_scenario* scenario, const misobc_channel_set* channels,
                                   misobc_report* out) {
    if (scenario == nullptr || channels == nullptr || out == nullptr) return null_argument();
    return guarded([&] {
        const auto& s = scenario->value;
        const auto r = misobc::delay_penalty(channels->value, s.rate_profile(), require_p_star(s), s.solver,
                                             s.throughput);
        *out = misobc_report{r.p_star, r.c_e, r.c_d, r.delay_penalty};
        return MISOBC_OK;
    });
}

misobc_status misobc_fairness_penalty(const misobc_scenario* scenario, const misobc_channel_set* channels,
                                      double* penalty, double* sum_capacity, double* alpha_star) {
    if (scenario == nullptr || channels == nullptr || penalty == nullptr) return null_argument();
    return guarded([&] {
        const auto& s = scenario->value;
        const double p = require_p_star(s);
        const auto cap = misobc::sum_capacity_profile(channels->value, p, s.solver.p3);
        const double ce = misobc::throughput(channels->value, s.rate_profile(), p,
                                             misobc::ThroughputMode::expected, s.solver, s.throughput);
        *penalty = cap.value - ce;
        if (sum_capacity != nullptr) *sum_capacity = cap.value;
        if (alpha_star != nullptr) {
            for (Eigen::Index k = 0; k < cap.alpha.size(); ++k) alpha_star[k] = cap.alpha(k);
        }
        return MISOBC_OK;
    });
}

misobc_status misobc_baselines(const misobc_scenario* scenario, const misobc_channel_set* channels, double* tdma,
                               double* zf) {
    if (scenario == nullptr || channels == nullptr || tdma == nullptr || zf == nullptr) return null_argument();
    return guarded([&] {
        const auto& s = scenario->value;
        if (s.profiles.empty()) throw misobc::ConfigError("scenario has no user profiles");
        *tdma = misobc::tdma_power(channels->value, s.profiles);
        *zf = channels->value.users() > channels->value.antennas()
                  ? std::numeric_limits<double>::quiet_NaN()
                  : misobc::zf_sdma_power(channels->value, s.profiles);
        return MISOBC_OK;
    });
}

misobc_status misobc_theorem_bound(double p_star, int users, double rho, double* out) {
    if (out == nullptr) return null_argument();
    return guarded([&] {
        *out = misobc::theorem_bound(p_star, users, rho);
        return MISOBC_OK;
    });
}

misobc_status misobc_estimate_rho(const misobc_scenario* scenario, int64_t samples, double* rho,
                                  double* std_error) {
    if (scenario == nullptr || rho == nullptr) return null_argument();
    return guarded([&] {
        const auto est = misobc::estimate_rho(scenario->value.fading, samples);
        *rho = est.value;
        if (std_error != nullptr) *std_error = est.std_error;
        return MISOBC_OK;
    });
}

misobc_status misobc_repro(const char* figure, uint64_t seed, int states, int seeds, const char* path) {
    if (figure == nullptr || path == nullptr) return null_argument();
    return guarded([&] {
        misobc::ReproOptions opts;
        opts.seed = seed;
        opts.states = states;
        if (seeds > 0) opts.seeds = seeds;
        auto os = open_out(path);
        misobc::repro(figure, opts, os);
        return MISOBC_OK;
    });
}

}  // extern "C"
