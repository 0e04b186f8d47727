/* Copyright 2026 The gcplan Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of the gcplan shared library.
 *
 * Every function returns a gcp_status; on anything but GCP_OK the
 * thread-local message from gcp_last_error() describes what went wrong.
 * Objects returned through out-parameters are owned by the caller and
 * released with the matching *_free function. Strings returned through
 * out-parameters are released with gcp_string_free.
 */

#ifndef GCPLAN_GCPLAN_H_
#define GCPLAN_GCPLAN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GCP_API __declspec(dllexport)
#else
#define GCP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gcp_status {
  GCP_OK = 0,
  GCP_ERROR_IO = 1,               /* file missing or unreadable/unwritable */
  GCP_ERROR_PARSE = 2,            /* malformed scenario or model data */
  GCP_ERROR_INVALID_ARGUMENT = 3, /* bad parameter or handle */
  GCP_ERROR_RUNTIME = 4,          /* anything else */
} gcp_status;

/* Message for the most recent failure on the calling thread. Never NULL;
 * empty before the first failure. Valid until the next failing call. */
GCP_API const char* gcp_last_error(void);

GCP_API void gcp_string_free(char* s);

/* --- Scenario sets ------------------------------------------------------- */

typedef struct gcp_scenario_set gcp_scenario_set;

typedef struct gcp_generator_params {
  uint64_t seed;
  int32_t count;
  double arm_length;             /* metres per approach, >= 40 */
  int32_t lanes_per_arm;         /* per direction, >= 1 */
  double speed_limit;            /* m/s */
  double agent_density;          /* expected vehicles per arm */
  double corrupt_route_fraction; /* [0, 1], goal swapped to a wrong exit */
} gcp_generator_params;

/* Fills in the documented defaults (count 100, 60 m arms, one lane,
 * 10 m/s, density 1, no corruption). */
GCP_API void gcp_generator_params_init(gcp_generator_params* params);

GCP_API gcp_status gcp_generate_scenarios(const gcp_generator_params* params,
                                          gcp_scenario_set** out);
GCP_API gcp_status gcp_scenario_set_load(const char* path,
                                         gcp_scenario_set** out);
GCP_API gcp_status gcp_scenario_set_save(const gcp_scenario_set* set,
                                         const char* path);
GCP_API gcp_status gcp_scenario_set_count(const gcp_scenario_set* set,
                                          int32_t* out);
GCP_API void gcp_scenario_set_free(gcp_scenario_set* set);

/* --- Models ---------------------------------------------------------------- */

typedef struct gcp_model gcp_model;

typedef struct gcp_train_params {
  /* unconditioned | hard_mask_at_train | node_features | soft_mask */
  const char* mode;
  int32_t epochs;
  double learning_rate;
  uint64_t seed;
} gcp_train_params;

GCP_API void gcp_train_params_init(gcp_train_params* params);

typedef struct gcp_train_report {
  double train_nll_initial;
  double train_nll_final;
  double heldout_nll_initial;
  double heldout_nll_final;
  int32_t used_scenarios;
  int32_t skipped_scenarios;
  int32_t heldout_scenarios;
} gcp_train_report;

/* report may be NULL. */
GCP_API gcp_status gcp_train(const gcp_scenario_set* set,
                             const gcp_train_params* params, gcp_model** out,
                             gcp_train_report* report);
GCP_API gcp_status gcp_model_load(const char* path, gcp_model** out);
GCP_API gcp_status gcp_model_save(const gcp_model* model, const char* path);
GCP_API void gcp_model_free(gcp_model* model);

/* --- Evaluation ------------------------------------------------------------ */

typedef struct gcp_eval_params {
  /* pgp | gc_pgp | soft_mask | hard_mask_trained | node_features |
   * filter_on_route | idm | expert */
  const char* planner;
  const char* loop; /* open | closed */
  uint64_t seed;
  int32_t repeat;
  int32_t jobs;

  /* Sampling planner settings. */
  int32_t k_samples;
  int32_t max_nodes;
  int32_t num_modes;
  int32_t has_beta_override; /* nonzero: beta_override applies (soft_mask) */
  double beta_override;

  /* IDM / MOBIL baseline settings. */
  double idm_desired_speed; /* 0 = scenario speed limit */
  double idm_time_headway;
  double idm_min_gap;
  double idm_max_accel;
  double idm_comfort_decel;
  double idm_exponent;
  int32_t mobil_enabled;
  double mobil_politeness;
  double mobil_accel_threshold;
  double mobil_safe_decel;
} gcp_eval_params;

GCP_API void gcp_eval_params_init(gcp_eval_params* params);

/* Runs the harness and returns the metrics CSV. model must be a trained
 * model for the sampling planners and may be NULL for idm/expert. */
GCP_API gcp_status gcp_evaluate(const gcp_scenario_set* set,
                                const gcp_model* model,
                                const gcp_eval_params* params, char** csv_out);

/* --- Reports ---------------------------------------------------------------
 *
 * Reads metrics CSVs, returns the comparison table, and, when plot_dir is
 * not NULL, writes one plot-data CSV per metric into it. */
GCP_API gcp_status gcp_report(const char* const* csv_paths, int32_t n_paths,
                              const char* plot_dir, char** table_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* GCPLAN_GCPLAN_H_ */
