/* SPDX-License-Identifier: Apache-2.0 */
/* Exercises the C interface from plain C. argv[1] is an existing scratch directory. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "brw/brw.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

int main(int argc, char** argv) {
  const char* dir = argc > 1 ? argv[1] : ".";
  char path[4096];
  brw_model* model = NULL;
  brw_model* poisson = NULL;
  brw_model* loaded_model = NULL;
  brw_forest* forest = NULL;
  brw_forest* loaded = NULL;
  brw_series* series = NULL;
  brw_renewal* table = NULL;
  brw_report* report = NULL;
  double value = 0.0;
  size_t k;

  EXPECT(strlen(brw_version()) > 0);
  EXPECT(strcmp(brw_status_string(BRW_OK), "ok") == 0);

  EXPECT(brw_model_create("binary_gaussian", 2.0 * log(2.0), &model) == BRW_OK);
  EXPECT(fabs(brw_model_sigma2(model) - 2.0 * log(2.0)) < 1e-12);
  EXPECT(brw_model_log_laplace(model, 1.0, &value) == BRW_OK);
  EXPECT(fabs(value) < 1e-12);
  EXPECT(brw_model_create("ternary", 1.0, &poisson) != BRW_OK);
  EXPECT(strlen(brw_last_error()) > 0);
  EXPECT(brw_model_from_json("{\"family\": \"poisson_gaussian\", \"s2\": 1.0}", &poisson) == BRW_OK);
  EXPECT(brw_model_from_json("not json", &loaded_model) != BRW_OK);
  EXPECT(loaded_model == NULL);
  EXPECT(brw_model_create(NULL, 1.0, NULL) == BRW_INVALID_ARGUMENT);

  EXPECT(brw_simulate(model, 8, 42, NAN, 0, &forest) == BRW_OK);
  EXPECT(brw_forest_depth(forest) == 8);
  for (k = 0; k <= 8; ++k) EXPECT(brw_forest_generation_size(forest, k) == ((size_t)1 << k));
  EXPECT(brw_forest_positions(forest, 9) == NULL);
  EXPECT(brw_forest_parents(forest, 8)[255] == 127);
  EXPECT(brw_simulate(model, 20, 1, NAN, 1000, &loaded) == BRW_PARTICLE_CAP_EXCEEDED);

  snprintf(path, sizeof path, "%s/forest.bin", dir);
  EXPECT(brw_forest_write_dump(forest, path) == BRW_OK);
  EXPECT(brw_forest_read_dump(path, &loaded) == BRW_OK);
  EXPECT(brw_forest_depth(loaded) == 8);
  EXPECT(memcmp(brw_forest_positions(loaded, 8), brw_forest_positions(forest, 8),
                256 * sizeof(double)) == 0);

  {
    const double betas[2] = {0.5, 1.0};
    EXPECT(brw_series_compute(forest, model, betas, 2, &series) == BRW_OK);
    EXPECT(brw_series_w(series, 0) == 1.0);
    EXPECT(fabs(brw_series_w_beta(series, 1, 8) - brw_series_w(series, 8)) < 1e-12);
    EXPECT(isfinite(brw_series_d(series, 8)));
  }

  EXPECT(brw_overlap_pair_mass(forest, 0.0, &value) == BRW_OK);
  EXPECT(fabs(value - 1.0) < 1e-15);
  EXPECT(brw_overlap_pair_mass(forest, -1.0, &value) == BRW_INVALID_ARGUMENT);
  {
    size_t leaves[100];
    size_t i;
    EXPECT(brw_polymer_sample(forest, model, 1.0, 100, 5, leaves) == BRW_OK);
    for (i = 0; i < 100; ++i) EXPECT(leaves[i] < 256);
  }

  EXPECT(brw_renewal_estimate(model, 2.0, 0.5, 2000, 4000000, 3, 1, &table) == BRW_OK);
  if (table) {
    EXPECT(brw_renewal_h0(table, 0.0) == 1.0);
    EXPECT(brw_renewal_h0(table, -1.0) == 0.0);
    EXPECT(brw_renewal_c0(table) > 0.5 && brw_renewal_c0(table) < 2.0);
    EXPECT(brw_renewal_theta(table) > 0.0);
    snprintf(path, sizeof path, "%s/renewal.csv", dir);
    EXPECT(brw_renewal_write_csv(table, path) == BRW_OK);
  }

  EXPECT(brw_meander_cdf(1.0, 1.0, &value) == BRW_OK);
  EXPECT(fabs(value - (1.0 - exp(-0.5))) < 1e-12);
  EXPECT(brw_meander_cdf(0.0, 1.0, &value) == BRW_DOMAIN_ERROR);
  EXPECT(brw_meander_exp_moment(1.0, &value) == BRW_OK);
  EXPECT(fabs(value - 4.477051811703694) < 1e-12);

  EXPECT(brw_experiment_count() == 9);
  EXPECT(strcmp(brw_experiment_name(4), "overlap") == 0);
  EXPECT(brw_experiment_name(99) == NULL);
  {
    brw_run_options opts;
    const char* config =
        "{\"model\": {\"family\": \"binary_gaussian\"},"
        " \"sim\": {\"max_gen\": 6, \"replicates\": 10, \"seed\": 1},"
        " \"experiment\": {\"n_values\": [4, 6], \"bruteforce_forests\": 2}}";
    memset(&opts, 0, sizeof opts);
    opts.threads = 2;
    opts.out_dir = dir;
    opts.format = "csv";
    EXPECT(brw_run_experiment("overlap", config, &opts, &report) == BRW_OK);
    if (report) {
      EXPECT(strstr(brw_report_json(report), "\"experiment\":\"overlap\"") != NULL);
      EXPECT(brw_report_passed(report) == 0 || brw_report_passed(report) == 1);
      brw_report_free(report);
      report = NULL;
    }
    EXPECT(brw_run_experiment("nope", config, &opts, &report) == BRW_CONFIG_ERROR);
    opts.format = "xml";
    EXPECT(brw_run_experiment("overlap", config, &opts, &report) == BRW_CONFIG_ERROR);
    opts.format = NULL;
    opts.out_dir = NULL;
    EXPECT(brw_run_experiment("overlap", "{\"sim\": {}}", &opts, &report) == BRW_CONFIG_ERROR);
  }

  brw_renewal_free(table);
  brw_series_free(series);
  brw_forest_free(loaded);
  brw_forest_free(forest);
  brw_model_free(poisson);
  brw_model_free(model);
  brw_forest_free(NULL);

  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("all C API checks passed\n");
  return 0;
}
