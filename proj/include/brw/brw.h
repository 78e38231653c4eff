/* SPDX-License-Identifier: Apache-2.0 */
/*
 * C interface to the branching random walk toolkit.
 *
 * Objects are opaque handles released with their *_free function. Every
 * function returning brw_status leaves a message for brw_last_error() on
 * failure; the message is thread-local and valid until the next failing call
 * on the same thread. The string from brw_report_json belongs to its report.
 */
#ifndef BRW_BRW_H
#define BRW_BRW_H

#include <stddef.h>
#include <stdint.h>

#if defined(BRW_BUILDING_LIBRARY)
#define BRW_API __attribute__((visibility("default")))
#else
#define BRW_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum brw_status {
  BRW_OK = 0,
  BRW_INVALID_ARGUMENT = 1,
  BRW_NO_SOLUTION = 2,
  BRW_UNBOUNDED = 3,
  BRW_PARTICLE_CAP_EXCEEDED = 4,
  BRW_ALL_EXTINCT = 5,
  BRW_INVALID_NODE = 6,
  BRW_BETA_OUTSIDE_DOMAIN = 7,
  BRW_EXTINCT_FOREST = 8,
  BRW_HORIZON_TOO_SMALL = 9,
  BRW_WEIGHT_COLLAPSE = 10,
  BRW_BUDGET_EXCEEDED = 11,
  BRW_DOMAIN_ERROR = 12,
  BRW_CONFIG_ERROR = 13,
  BRW_IO_ERROR = 14,
  BRW_INTERNAL_ERROR = 99
} brw_status;

typedef struct brw_model brw_model;
typedef struct brw_forest brw_forest;
typedef struct brw_series brw_series;
typedef struct brw_renewal brw_renewal;
typedef struct brw_report brw_report;

BRW_API const char* brw_version(void);
BRW_API const char* brw_status_string(brw_status status);
BRW_API const char* brw_last_error(void);

/* Models. family is "binary_gaussian" or "poisson_gaussian" (s2 > 0). */
BRW_API brw_status brw_model_create(const char* family, double s2, brw_model** out);
/* Same JSON as the `model` block of a run configuration. */
BRW_API brw_status brw_model_from_json(const char* json, brw_model** out);
BRW_API void brw_model_free(brw_model* model);
BRW_API double brw_model_sigma2(const brw_model* model);
BRW_API brw_status brw_model_log_laplace(const brw_model* model, double beta, double* out);

/* Forests. A NaN barrier_alpha means no barrier; max_particles 0 means the default cap. */
BRW_API brw_status brw_simulate(const brw_model* model, size_t n, uint64_t seed,
                                double barrier_alpha, size_t max_particles, brw_forest** out);
BRW_API brw_status brw_simulate_surviving(const brw_model* model, size_t n, uint64_t seed,
                                          size_t replicate, brw_forest** out);
BRW_API void brw_forest_free(brw_forest* forest);
BRW_API size_t brw_forest_depth(const brw_forest* forest);
BRW_API size_t brw_forest_generation_size(const brw_forest* forest, size_t k);
/* Pointers into the forest, valid until brw_forest_free. NULL when k > depth. */
BRW_API const double* brw_forest_positions(const brw_forest* forest, size_t k);
BRW_API const uint32_t* brw_forest_parents(const brw_forest* forest, size_t k);
BRW_API brw_status brw_forest_write_dump(const brw_forest* forest, const char* path);
BRW_API brw_status brw_forest_read_dump(const char* path, brw_forest** out);

/* Martingale series over generations 0..depth. */
BRW_API brw_status brw_series_compute(const brw_forest* forest, const brw_model* model,
                                      const double* betas, size_t n_betas, brw_series** out);
BRW_API void brw_series_free(brw_series* series);
BRW_API double brw_series_w(const brw_series* series, size_t k);
BRW_API double brw_series_d(const brw_series* series, size_t k);
BRW_API double brw_series_w_beta(const brw_series* series, size_t beta_index, size_t k);

BRW_API brw_status brw_overlap_pair_mass(const brw_forest* forest, double delta, double* out);
/* Writes `count` leaf indices drawn from the polymer measure at inverse temperature beta. */
BRW_API brw_status brw_polymer_sample(const brw_forest* forest, const brw_model* model,
                                      double beta, size_t count, uint64_t seed,
                                      size_t* leaf_indices);

/* Renewal function on the grid 0, u_step, ..., u_max. */
BRW_API brw_status brw_renewal_estimate(const brw_model* model, double u_max, double u_step,
                                        size_t walks, size_t horizon, uint64_t seed,
                                        unsigned threads, brw_renewal** out);
BRW_API void brw_renewal_free(brw_renewal* table);
BRW_API double brw_renewal_h0(const brw_renewal* table, double u);
BRW_API double brw_renewal_c0(const brw_renewal* table);
BRW_API double brw_renewal_theta(const brw_renewal* table);
BRW_API brw_status brw_renewal_write_csv(const brw_renewal* table, const char* path);

BRW_API brw_status brw_meander_cdf(double t, double x, double* out);
BRW_API brw_status brw_meander_exp_moment(double a, double* out);

/* Experiments. out_dir may be NULL to skip writing files. format is "csv" or "jsonl". */
typedef struct brw_run_options {
  uint64_t seed;
  int has_seed;
  unsigned threads;
  const char* out_dir;
  const char* format;
} brw_run_options;

BRW_API size_t brw_experiment_count(void);
BRW_API const char* brw_experiment_name(size_t index);
BRW_API brw_status brw_run_experiment(const char* name, const char* config_json,
                                      const brw_run_options* options, brw_report** out);
BRW_API void brw_report_free(brw_report* report);
BRW_API const char* brw_report_json(const brw_report* report);
BRW_API int brw_report_passed(const brw_report* report);

#ifdef __cplusplus
}
#endif

#endif /* BRW_BRW_H */
