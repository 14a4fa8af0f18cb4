#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <mutex>
#include <string>
#include <vector>

#include "misobc/fading.hpp"
#include "misobc/scheduler.hpp"
#include "misobc/throughput.hpp"

namespace misobc {

// One CSV line: experiment,param,metric,value,seed. Infeasible or failed
// points carry value NaN and a metric suffixed with ":infeasible" or ":error".
// Rows aggregated over seeds use seed -1.
struct ResultRow {
    std::string experiment;
    double param = 0.0;
    std::string metric;
    double value = 0.0;
    std::int64_t seed = -1;
};

std::string result_csv_header();
std::string result_csv_line(const ResultRow& row);

// Serializes appends from concurrent workers into one stream.
class CsvAppender {
public:
    explicit CsvAppender(std::ostream& os, bool header = true);
    void append(const std::vector<ResultRow>& rows);

private:
    std::mutex mutex_;
    std::ostream& os_;
};

// Runs body(i) for i in [0, count) on up to `threads` workers (0: hardware
// concurrency). Exceptions are rethrown after all workers stop.
void parallel_for(int count, const std::function<void(int)>& body, int threads = 0);

// Mean of the rows matching (param, metric) over seeds.
double mean_of(const std::vector<ResultRow>& rows, double param, const std::string& metric);

struct MixedTrafficOptions {
    int users = 4;
    int antennas = 4;
    int states = 100;
    std::vector<std::uint64_t> seeds;
    double sum_rate = 6.0;
    std::vector<double> gammas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    SolverConfig solver;
    int threads = 0;
};

// Average power of the proposed scheduler, TDMA and ZF-SDMA per (gamma, seed)
// (metrics "proposed", "tdma", "zf"), followed by seed means.
std::vector<ResultRow> run_mixed_traffic(const MixedTrafficOptions& opts, const std::string& id = "mixed");

struct OnlineRow {
    int t = 0;
    int user = 0;
    double rbar = 0.0;
    double mu = 0.0;
    double rate = 0.0;
    double power = 0.0;
};

std::string online_csv_header();
std::string online_csv_line(const OnlineRow& row);

// Table II over `blocks` i.i.d. channel draws from `spec` (spec.states is
// ignored). One row per (block, user).
std::vector<OnlineRow> run_online(const FadingSpec& spec, std::span<const UserProfile> profiles, int blocks,
                                  const SolverConfig& config);

struct TradeoffOptions {
    int antennas = 2;
    int states = 50;
    std::uint64_t seed = 1;
    std::vector<double> p_stars = {2.0, 5.0, 10.0, 20.0};
    std::vector<RateProfile> networks;  // default: (2/3,1/3) and (2/6,2/6,1/6,1/6)
    SolverConfig solver;
    ThroughputConfig throughput;
    int threads = 0;
};

// Metrics "C_e_K<k>", "C_d_K<k>", "penalty_K<k>" against p_star.
std::vector<ResultRow> run_tradeoff(const TradeoffOptions& opts, const std::string& id = "tradeoff");

struct FairnessOptions {
    int antennas = 2;
    int states = 100;
    std::uint64_t seed = 1;
    double p_star = 10.0;
    std::vector<double> phis;  // default 0.05, 0.10, ..., 0.95
    std::vector<double> symmetric_variances = {1.0, 1.0};
    std::vector<double> asymmetric_variances = {2.0, 0.5};
    SolverConfig solver;
    ThroughputConfig throughput;
    int threads = 0;
};

// Expected throughput with alpha = (phi, 1 - phi): metrics "C_e_symmetric"
// and "C_e_asymmetric", plus "C_sum_*" (param = the sum-capacity share of
// user 1).
std::vector<ResultRow> run_fairness(const FairnessOptions& opts, const std::string& id = "fairness");

// Grid point maximizing `values`. When several points lie within `tol` of the
// maximum (a flat top), returns the midpoint of that plateau.
double plateau_argmax(const std::vector<double>& grid, const std::vector<double>& values, double tol);

struct ReproOptions {
    std::uint64_t seed = 1;
    int states = 0;      // 0: figure default
    int seeds = 20;      // seed count for the power comparisons
    int threads = 0;
};

// Desk-scale reproduction of fig5, fig6, fig7, fig9 or fig10, written as CSV
// (the online schema for fig7, the result-row schema otherwise).
void repro(const std::string& figure, const ReproOptions& opts, std::ostream& os);

}  // namespace misobc
