/* C interface to the misobc scheduler library.
 *
 * Objects are opaque handles created and released by the library. Every
 * function returns a misobc_status; on failure misobc_last_error() describes
 * the problem (thread-local, valid until the next call on the same thread).
 */
#ifndef MISOBC_H
#define MISOBC_H

#include <stddef.h>
#include <stdint.h>

#if defined(MISOBC_BUILDING_LIBRARY)
#define MISOBC_API __attribute__((visibility("default")))
#else
#define MISOBC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum misobc_status {
    MISOBC_OK = 0,
    MISOBC_ERR_ARGUMENT = 1,       /* null pointer or invalid argument */
    MISOBC_ERR_INFEASIBLE = 2,     /* targets cannot be met with finite power */
    MISOBC_ERR_NOT_CONVERGED = 3,  /* result produced but tolerances not met */
    MISOBC_ERR_CONFIG = 4,         /* malformed scenario or parameters */
    MISOBC_ERR_DIMENSION = 5,
    MISOBC_ERR_UNSUPPORTED = 6,    /* e.g. zero-forcing with K > M */
    MISOBC_ERR_CAPACITY = 7,       /* problem too large for an exhaustive method */
    MISOBC_ERR_DIVERGENCE = 8,     /* expectation is infinite */
    MISOBC_ERR_IO = 9,
    MISOBC_ERR_INTERNAL = 10
} misobc_status;

typedef enum misobc_mode {
    MISOBC_MODE_EXPECTED = 0,      /* all users average-rate (NDC) */
    MISOBC_MODE_DELAY_LIMITED = 1  /* all users constant-rate (DC) */
} misobc_mode;

typedef struct misobc_scenario misobc_scenario;
typedef struct misobc_channel_set misobc_channel_set;

typedef struct misobc_solve_summary {
    double average_power;
    double dual_bound;
    double duality_gap;
    int iterations;
    int converged; /* 1 when the duality gap met the configured tolerance */
} misobc_solve_summary;

typedef struct misobc_report {
    double p_star;
    double c_e;
    double c_d;
    double delay_penalty;
} misobc_report;

MISOBC_API const char* misobc_version(void);
MISOBC_API const char* misobc_last_error(void);
MISOBC_API const char* misobc_status_string(misobc_status status);

/* Scenarios (JSON configuration). */
MISOBC_API misobc_status misobc_scenario_load(const char* path, misobc_scenario** out);
MISOBC_API misobc_status misobc_scenario_parse(const char* json_text, misobc_scenario** out);
MISOBC_API void misobc_scenario_free(misobc_scenario* scenario);
MISOBC_API misobc_status misobc_scenario_set_seed(misobc_scenario* scenario, uint64_t seed);
MISOBC_API misobc_status misobc_scenario_set_states(misobc_scenario* scenario, int states);
MISOBC_API misobc_status misobc_scenario_set_blocks(misobc_scenario* scenario, int blocks);
MISOBC_API misobc_status misobc_scenario_users(const misobc_scenario* scenario, int* users);
/* Copies the configured output path (may be empty) into buf, NUL-terminated. */
MISOBC_API misobc_status misobc_scenario_output_path(const misobc_scenario* scenario, char* buf, size_t size);
/* Writes the scenario back as JSON to a file. */
MISOBC_API misobc_status misobc_scenario_save(const misobc_scenario* scenario, const char* path);

/* Channel ensembles. */
MISOBC_API misobc_status misobc_channels_generate(const misobc_scenario* scenario, misobc_channel_set** out);
/* entries: N blocks of K rows of 2M doubles (re, im interleaved); probs may be
 * NULL for a uniform ensemble. */
MISOBC_API misobc_status misobc_channels_create(int users, int antennas, int states, const double* entries,
                                                const double* probs, misobc_channel_set** out);
MISOBC_API misobc_status misobc_channels_load(const char* path, misobc_channel_set** out);
MISOBC_API misobc_status misobc_channels_save(const misobc_channel_set* channels, const char* path);
MISOBC_API misobc_status misobc_channels_dims(const misobc_channel_set* channels, int* users, int* antennas,
                                              int* states);
MISOBC_API void misobc_channels_free(misobc_channel_set* channels);

/* Offline minimum-power scheduling of the scenario's profiles. avg_rates
 * (length K) and trace_path (CSV iter,user,mu,avg_rate,power) are optional.
 * Returns MISOBC_ERR_NOT_CONVERGED with a filled summary when the iteration
 * limit was hit. */
MISOBC_API misobc_status misobc_solve_offline(const misobc_scenario* scenario, const misobc_channel_set* channels,
                                              const char* trace_path, misobc_solve_summary* summary,
                                              double* avg_rates);

/* Online scheduler over the scenario's block count; trace CSV
 * t,user,rbar,mu,rate,power. final_rbar (length K) is optional. */
MISOBC_API misobc_status misobc_run_online(const misobc_scenario* scenario, const char* trace_path,
                                           double* final_rbar);

/* Throughput under the scenario's rate profile and p_star. */
MISOBC_API misobc_status misobc_throughput(const misobc_scenario* scenario, const misobc_channel_set* channels,
                                           misobc_mode mode, double* out);
MISOBC_API misobc_status misobc_delay_penalty(const misobc_scenario* scenario,
                                              const misobc_channel_set* channels, misobc_report* out);
/* Fairness penalty of the scenario's rate profile; sum_capacity and
 * alpha_star (length K) are optional outputs. */
MISOBC_API misobc_status misobc_fairness_penalty(const misobc_scenario* scenario,
                                                 const misobc_channel_set* channels, double* penalty,
                                                 double* sum_capacity, double* alpha_star);
/* Average power of TDMA and ZF-SDMA for the scenario's profiles. zf is NaN
 * when K > M. */
MISOBC_API misobc_status misobc_baselines(const misobc_scenario* scenario, const misobc_channel_set* channels,
                                          double* tdma, double* zf);

MISOBC_API misobc_status misobc_theorem_bound(double p_star, int users, double rho, double* out);
MISOBC_API misobc_status misobc_estimate_rho(const misobc_scenario* scenario, int64_t samples, double* rho,
                                             double* std_error);

/* Desk-scale figure reproduction ("fig5", "fig6", "fig7", "fig9", "fig10")
 * written as CSV to path. states = 0 keeps the figure default. */
MISOBC_API misobc_status misobc_repro(const char* figure, uint64_t seed, int states, int seeds,
                                      const char* path);

#ifdef __cplusplus
}
#endif

#endif /* MISOBC_H */
