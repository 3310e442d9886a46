// Copyright 2026 The lrquad Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LRQUAD_LRQUAD_H_
#define LRQUAD_LRQUAD_H_

/*
 * C interface to lrquad: recovery of a rank-r factor X (n x r, up to a right
 * orthogonal factor) from quadratic measurements y_i = |a_i^T X|^2 with a
 * truncated spectral initialization followed by exponential-type gradient
 * descent, plus the benchmark and probe harness.
 *
 * Conventions:
 *  - Every fallible call returns an lrq_status. On failure the out-parameters
 *    are left untouched and lrq_last_error() describes the problem for the
 *    calling thread.
 *  - Objects are opaque handles created by lrq_*_create / lrq_* producers and
 *    released with the matching lrq_*_destroy. Destroy functions accept NULL.
 *  - Matrices cross the boundary in row-major order.
 *  - Strings returned as const char* are owned by the handle they came from
 *    and stay valid until that handle is destroyed.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(LRQUAD_BUILDING)
#    define LRQ_API __declspec(dllexport)
#  else
#    define LRQ_API __declspec(dllimport)
#  endif
#else
#  define LRQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lrq_status {
  LRQ_OK = 0,
  LRQ_ERR_INVALID_ARGUMENT = 1,
  LRQ_ERR_DIMENSION_MISMATCH = 2,
  LRQ_ERR_DEGENERATE_MEASUREMENTS = 3,
  LRQ_ERR_NOT_SYMMETRIC = 4,
  LRQ_ERR_NOT_CONVERGED = 5,
  LRQ_ERR_NON_FINITE = 6,
  LRQ_ERR_IO = 7,
  LRQ_ERR_PARSE = 8,
  LRQ_ERR_UNKNOWN_PROBE = 9,
  LRQ_ERR_INTERNAL = 99
} lrq_status;

LRQ_API const char* lrq_version(void);
LRQ_API const char* lrq_status_string(lrq_status status);
/* Message of the last failed call on this thread; "" if none. */
LRQ_API const char* lrq_last_error(void);

/* ------------------------------------------------------------------ matrix */

typedef struct lrq_matrix lrq_matrix;

/* data may be NULL for a zero matrix; otherwise rows*cols row-major values. */
LRQ_API lrq_status lrq_matrix_create(size_t rows, size_t cols, const double* data, lrq_matrix** out);
LRQ_API void lrq_matrix_destroy(lrq_matrix* m);
LRQ_API size_t lrq_matrix_rows(const lrq_matrix* m);
LRQ_API size_t lrq_matrix_cols(const lrq_matrix* m);
LRQ_API double lrq_matrix_get(const lrq_matrix* m, size_t row, size_t col);
/* Copies rows*cols values; len must be at least that. */
LRQ_API lrq_status lrq_matrix_copy_to(const lrq_matrix* m, double* data, size_t len);
/* Text format: "rows cols" on the first line, then one row per line. */
LRQ_API lrq_status lrq_matrix_read_text(const char* path, lrq_matrix** out);
LRQ_API lrq_status lrq_matrix_write_text(const lrq_matrix* m, const char* path);

/* min over orthogonal O of |X O - U|_F / |X|_F. */
LRQ_API lrq_status lrq_relative_error(const lrq_matrix* u, const lrq_matrix* x, double* out);

/* Seeded synthetic instance: Gaussian X (n x r), Gaussian A (m x n) and
 * y = |A X|^2 row-wise (m x 1) plus N(0, sigma^2) noise. Any out pointer may be
 * NULL if the caller does not need it. */
LRQ_API lrq_status lrq_generate(size_t n, size_t r, size_t m, double sigma, uint64_t seed, lrq_matrix** x,
                                lrq_matrix** a, lrq_matrix** y);

/* ---------------------------------------------------------------- recovery */

typedef enum lrq_variant { LRQ_VARIANT_EXPONENTIAL = 0, LRQ_VARIANT_PLAIN = 1 } lrq_variant;

typedef enum lrq_step_rule { LRQ_STEP_EMPIRICAL = 0, LRQ_STEP_FIXED = 1 } lrq_step_rule;

typedef enum lrq_termination {
  LRQ_TERM_REACHED_TOLERANCE = 0,
  LRQ_TERM_STATIONARY = 1,
  LRQ_TERM_MAX_ITERS = 2,
  LRQ_TERM_DIVERGED = 3
} lrq_termination;

typedef struct lrq_recover_options {
  double alpha;       /* exponential weight parameter, default 20 */
  double alpha_y;     /* truncation parameter, default 9 */
  lrq_variant variant;
  lrq_step_rule step_rule;
  double step_c;      /* empirical rule: mu = step_c * m / sum(y), default 0.1 */
  double step_mu;     /* fixed rule */
  int max_iters;      /* default 3000 */
  double grad_tol;    /* <= 0 selects 1e-10 * max(1, f_w(U0)) */
} lrq_recover_options;

typedef struct lrq_trace_record {
  int iteration;
  double objective;
  double weighted_objective;
  double grad_norm;
  double relative_error; /* NaN for blind recovery */
} lrq_trace_record;

typedef struct lrq_run lrq_run;

LRQ_API void lrq_recover_options_init(lrq_recover_options* options);

/* a: m x n sensing matrix, y: m x 1 (or 1 x m) measurements. options may be NULL.
 * A diverged run is still returned; check lrq_run_termination. */
LRQ_API lrq_status lrq_recover(const lrq_matrix* a, const lrq_matrix* y, size_t r,
                               const lrq_recover_options* options, lrq_run** out);
LRQ_API void lrq_run_destroy(lrq_run* run);
/* New matrix holding the final iterate; release with lrq_matrix_destroy. */
LRQ_API lrq_status lrq_run_solution(const lrq_run* run, lrq_matrix** out);
LRQ_API lrq_status lrq_run_initial(const lrq_run* run, lrq_matrix** out);
LRQ_API int lrq_run_iterations(const lrq_run* run);
LRQ_API int lrq_run_converged(const lrq_run* run);
LRQ_API lrq_termination lrq_run_termination(const lrq_run* run);
LRQ_API double lrq_run_step_size(const lrq_run* run);
LRQ_API size_t lrq_run_kept_count(const lrq_run* run);
LRQ_API size_t lrq_run_trace_length(const lrq_run* run);
LRQ_API lrq_status lrq_run_trace_record(const lrq_run* run, size_t index, lrq_trace_record* out);

/* ------------------------------------------------------------- experiments */

typedef enum lrq_experiment_kind {
  LRQ_EXPERIMENT_PHASE_TRANSITION = 0,
  LRQ_EXPERIMENT_CONVERGENCE = 1,
  LRQ_EXPERIMENT_INIT_QUALITY = 2,
  LRQ_EXPERIMENT_THEORY_CHECK = 3
} lrq_experiment_kind;

enum { LRQ_VARIANTS_EXPONENTIAL = 1, LRQ_VARIANTS_PLAIN = 2, LRQ_VARIANTS_BOTH = 3 };

typedef struct lrq_experiment_spec lrq_experiment_spec;

/* Creates a spec populated with the defaults for kind. */
LRQ_API lrq_status lrq_spec_create(lrq_experiment_kind kind, lrq_experiment_spec** out);
LRQ_API void lrq_spec_destroy(lrq_experiment_spec* spec);
LRQ_API lrq_status lrq_spec_set_size(lrq_experiment_spec* spec, size_t n, size_t r);
/* Comma separated list of counts, each absolute ("400") or a multiple of n*r ("2.5nr"). */
LRQ_API lrq_status lrq_spec_set_m_grid(lrq_experiment_spec* spec, const char* grid);
LRQ_API lrq_status lrq_spec_set_trials(lrq_experiment_spec* spec, int trials);
LRQ_API lrq_status lrq_spec_set_alphas(lrq_experiment_spec* spec, const double* alphas, size_t count);
LRQ_API lrq_status lrq_spec_set_alpha_y(lrq_experiment_spec* spec, double alpha_y);
LRQ_API lrq_status lrq_spec_set_step_c(lrq_experiment_spec* spec, double c);
LRQ_API lrq_status lrq_spec_set_sigma(lrq_experiment_spec* spec, double sigma);
LRQ_API lrq_status lrq_spec_set_seed(lrq_experiment_spec* spec, uint64_t seed);
/* Bitmask of LRQ_VARIANTS_*. */
LRQ_API lrq_status lrq_spec_set_variants(lrq_experiment_spec* spec, int variants);
LRQ_API lrq_status lrq_spec_set_max_iters(lrq_experiment_spec* spec, int max_iters);
LRQ_API lrq_status lrq_spec_set_tol(lrq_experiment_spec* spec, double tol);
LRQ_API lrq_status lrq_spec_set_threads(lrq_experiment_spec* spec, unsigned threads);
/* Convergence runs only: start from the ground truth instead of the spectral guess. */
LRQ_API lrq_status lrq_spec_set_init_from_truth(lrq_experiment_spec* spec, int enabled);
/* Theory check only: comma separated probe names; NULL or "" selects the default suite. */
LRQ_API lrq_status lrq_spec_set_probes(lrq_experiment_spec* spec, const char* probes);
/* Validates without running (unknown probe names are reported here). */
LRQ_API lrq_status lrq_spec_validate(const lrq_experiment_spec* spec);

typedef struct lrq_report lrq_report;

LRQ_API lrq_status lrq_experiment_run(const lrq_experiment_spec* spec, lrq_report** out);
LRQ_API void lrq_report_destroy(lrq_report* report);
/* Primary table (schema depends on the kind). */
LRQ_API const char* lrq_report_csv(const lrq_report* report);
/* One row per trial and configuration (phase transition and convergence). */
LRQ_API const char* lrq_report_trials_csv(const lrq_report* report);
LRQ_API const char* lrq_report_json(const lrq_report* report);
/* Same as lrq_report_json with per-cell wall times included. */
LRQ_API const char* lrq_report_json_timed(const lrq_report* report);
/* 1 when every asserted probe passed (always 1 for kinds without probes). */
LRQ_API int lrq_report_all_passed(const lrq_report* report);
LRQ_API size_t lrq_report_cell_count(const lrq_report* report);
/* Success rate of cell index (order matches the CSV rows). */
LRQ_API lrq_status lrq_report_cell_success_rate(const lrq_report* report, size_t index, double* out);

/* Writes text to path; convenience for the CLI and bindings. */
LRQ_API lrq_status lrq_write_file(const char* path, const char* text);

#ifdef __cplusplus
}
#endif

#endif /* LRQUAD_LRQUAD_H_ */
