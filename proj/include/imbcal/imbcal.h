/* Copyright 2026 The imbcal Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
/* imbcal: post-training calibration of classifier posteriors for label
 * prior shift.
 *
 * Every object crosses the boundary as an opaque handle created by an
 * imbcal_*_create/load/run function and released with the matching
 * imbcal_*_free. Functions that can fail return an imbcal_status; on failure
 * imbcal_last_error() describes the problem (per thread) and no output handle
 * is written. Matrices are row-major N x K float64.
 */
#ifndef IMBCAL_IMBCAL_H_
#define IMBCAL_IMBCAL_H_

#include <stddef.h>
#include <stdint.h>

#if defined(IMBCAL_BUILDING_LIBRARY)
#define IMBCAL_API __attribute__((visibility("default")))
#else
#define IMBCAL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum imbcal_status {
  IMBCAL_OK = 0,
  IMBCAL_ERR_VALIDATION = 1, /* bad argument, shape, or file content */
  IMBCAL_ERR_IO = 2,         /* unreadable/unwritable file, corrupt header */
  IMBCAL_ERR_NUMERIC = 3,    /* non-finite metric, diverged training */
  IMBCAL_ERR_INTERNAL = 4
} imbcal_status;

typedef enum imbcal_content {
  IMBCAL_CONTENT_LOGITS = 0,
  IMBCAL_CONTENT_PROBS = 1
} imbcal_content;

typedef enum imbcal_prior_role {
  IMBCAL_PRIOR_SOURCE = 0,
  IMBCAL_PRIOR_TARGET = 1
} imbcal_prior_role;

typedef enum imbcal_metric {
  IMBCAL_METRIC_ACCURACY = 0,
  IMBCAL_METRIC_MEAN_ACCURACY = 1,
  IMBCAL_METRIC_MEAN_IOU = 2
} imbcal_metric;

typedef enum imbcal_toy_shape {
  IMBCAL_TOY_TWO_MOONS = 0,
  IMBCAL_TOY_CIRCLE = 1
} imbcal_toy_shape;

typedef struct imbcal_matrix imbcal_matrix;
typedef struct imbcal_labels imbcal_labels;
typedef struct imbcal_prior imbcal_prior;
typedef struct imbcal_report imbcal_report;
typedef struct imbcal_curve imbcal_curve;
typedef struct imbcal_fusion imbcal_fusion;
typedef struct imbcal_task imbcal_task;
typedef struct imbcal_toy_result imbcal_toy_result;

IMBCAL_API const char* imbcal_version(void);
IMBCAL_API const char* imbcal_status_name(imbcal_status status);
IMBCAL_API const char* imbcal_last_error(void);

/* ---- Matrices ---------------------------------------------------------- */

/* Copies rows*cols values. Logits must be finite; probs row-stochastic. */
IMBCAL_API imbcal_status imbcal_matrix_create(const double* values, size_t rows, size_t cols,
                                              imbcal_content content, imbcal_matrix** out);
/* Binary prediction file, or CSV when the path ends in ".csv" (CSV has no
 * header, so csv_content says what it holds). */
IMBCAL_API imbcal_status imbcal_matrix_load(const char* path, imbcal_content csv_content,
                                            imbcal_matrix** out);
IMBCAL_API imbcal_status imbcal_matrix_save(const imbcal_matrix* m, const char* path);
IMBCAL_API size_t imbcal_matrix_rows(const imbcal_matrix* m);
IMBCAL_API size_t imbcal_matrix_cols(const imbcal_matrix* m);
IMBCAL_API imbcal_content imbcal_matrix_content(const imbcal_matrix* m);
/* Borrowed pointer, valid until the matrix is freed. */
IMBCAL_API const double* imbcal_matrix_data(const imbcal_matrix* m);
IMBCAL_API void imbcal_matrix_free(imbcal_matrix* m);

/* ---- Labels and priors ------------------------------------------------- */

IMBCAL_API imbcal_status imbcal_labels_create(const uint32_t* values, size_t n, size_t n_classes,
                                              imbcal_labels** out);
/* One class index per line. */
IMBCAL_API imbcal_status imbcal_labels_load(const char* path, size_t n_classes,
                                            imbcal_labels** out);
IMBCAL_API size_t imbcal_labels_size(const imbcal_labels* labels);
IMBCAL_API const uint32_t* imbcal_labels_data(const imbcal_labels* labels);
IMBCAL_API void imbcal_labels_free(imbcal_labels* labels);

/* Reads one real number per line (blank lines and '#' comments skipped).
 * On success *values owns *n doubles; release with imbcal_values_free. */
IMBCAL_API imbcal_status imbcal_values_load(const char* path, double** values, size_t* n);
IMBCAL_API void imbcal_values_free(double* values);

/* Row-wise argmax of a probability matrix; ties go to the lowest index. */
IMBCAL_API imbcal_status imbcal_argmax(const imbcal_matrix* probs, imbcal_labels** out);

IMBCAL_API imbcal_status imbcal_prior_create(const double* values, size_t n_classes,
                                             imbcal_prior_role role, imbcal_prior** out);
/* One probability per line, or the keyword "uniform". */
IMBCAL_API imbcal_status imbcal_prior_load(const char* path_or_uniform, size_t n_classes,
                                           imbcal_prior_role role, imbcal_prior** out);
/* Empirical class frequencies (empty classes floored at 1e-12). */
IMBCAL_API imbcal_status imbcal_prior_estimate(const imbcal_labels* labels, imbcal_prior** out);
IMBCAL_API size_t imbcal_prior_size(const imbcal_prior* prior);
IMBCAL_API const double* imbcal_prior_data(const imbcal_prior* prior);
IMBCAL_API void imbcal_prior_free(imbcal_prior* prior);

/* ---- Posterior transforms ---------------------------------------------- */

IMBCAL_API imbcal_status imbcal_softmax(const imbcal_matrix* logits, imbcal_matrix** out);
/* softmax(logits * delta). n_delta == 1 applies one delta to every row,
 * otherwise n_delta must equal the row count. */
IMBCAL_API imbcal_status imbcal_temperature_scale(const imbcal_matrix* logits, const double* delta,
                                                  size_t n_delta, imbcal_matrix** out);
/* P_d * P_t / P_s, renormalized per row. */
IMBCAL_API imbcal_status imbcal_rebalance(const imbcal_matrix* probs, const imbcal_prior* source,
                                          const imbcal_prior* target, imbcal_matrix** out);
/* P_d^(1-lambda) * P_r^lambda, renormalized per row. lambda >= 0. */
IMBCAL_API imbcal_status imbcal_interpolate(const imbcal_matrix* p_d, const imbcal_matrix* p_r,
                                            double lambda, imbcal_matrix** out);
/* imbcal_rebalance followed by imbcal_interpolate. */
IMBCAL_API imbcal_status imbcal_calibrate(const imbcal_matrix* probs, const imbcal_prior* source,
                                          const imbcal_prior* target, double lambda,
                                          imbcal_matrix** out);

/* ---- Reports ----------------------------------------------------------- */

/* Confusion-matrix metrics of argmax(probs) against labels. */
IMBCAL_API imbcal_status imbcal_evaluate(const imbcal_matrix* probs, const imbcal_labels* labels,
                                         imbcal_report** out);
/* Reads a number through a JSON pointer such as "/accuracy". */
IMBCAL_API imbcal_status imbcal_report_number(const imbcal_report* report, const char* pointer,
                                              double* out);
/* Borrowed strings, valid until the report is freed. */
IMBCAL_API const char* imbcal_report_json(const imbcal_report* report);
/* Only evaluation reports have a CSV form; others return "". */
IMBCAL_API const char* imbcal_report_csv_header(const imbcal_report* report);
IMBCAL_API const char* imbcal_report_csv_row(const imbcal_report* report);
IMBCAL_API void imbcal_report_free(imbcal_report* report);

/* ---- Lambda search ----------------------------------------------------- */

typedef struct imbcal_search_config {
  double low;      /* 0.0 */
  double high;     /* 2.0 */
  double prec;     /* 0.1 */
  double max_high; /* 16.0: cap for the range expansion */
} imbcal_search_config;

typedef struct imbcal_search_summary {
  double lambda;
  double score;
  size_t evaluations;
  int hit_cap; /* expansion reached max_high */
} imbcal_search_summary;

/* Higher is better. Returning anything but IMBCAL_OK aborts the search and
 * that status is passed through. */
typedef imbcal_status (*imbcal_metric_fn)(double lambda, void* user_data, double* score);

IMBCAL_API imbcal_search_config imbcal_search_config_default(void);

/* Modified binary search on the grid low + j*prec. `trace` (nullable)
 * receives the evaluated points sorted by lambda. */
IMBCAL_API imbcal_status imbcal_search_lambda(imbcal_metric_fn metric, void* user_data,
                                              const imbcal_search_config* config,
                                              imbcal_search_summary* summary,
                                              imbcal_curve** trace);
/* Every grid point in [low, high]; ties go to the lowest lambda. */
IMBCAL_API imbcal_status imbcal_grid_search(imbcal_metric_fn metric, void* user_data,
                                            const imbcal_search_config* config,
                                            double* best_lambda, imbcal_curve** curve);
/* imbcal_search_lambda with the metric computed from calibrated
 * validation posteriors. */
IMBCAL_API imbcal_status imbcal_search_calibration(const imbcal_matrix* probs,
                                                   const imbcal_labels* labels,
                                                   const imbcal_prior* source,
                                                   const imbcal_prior* target,
                                                   imbcal_metric metric,
                                                   const imbcal_search_config* config,
                                                   imbcal_search_summary* summary,
                                                   imbcal_curve** trace);
/* Same objective as imbcal_search_calibration, every grid point. */
IMBCAL_API imbcal_status imbcal_grid_calibration(const imbcal_matrix* probs,
                                                 const imbcal_labels* labels,
                                                 const imbcal_prior* source,
                                                 const imbcal_prior* target, imbcal_metric metric,
                                                 const imbcal_search_config* config,
                                                 double* best_lambda, imbcal_curve** curve);

IMBCAL_API size_t imbcal_curve_size(const imbcal_curve* curve);
IMBCAL_API imbcal_status imbcal_curve_point(const imbcal_curve* curve, size_t index, double* x,
                                            double* y);
/* 1 if the values rise (non-strictly) to a peak then fall, else 0. */
IMBCAL_API int imbcal_curve_is_unimodal(const imbcal_curve* curve);
/* Two-column CSV with a header line. Borrowed. */
IMBCAL_API const char* imbcal_curve_csv(const imbcal_curve* curve);
IMBCAL_API void imbcal_curve_free(imbcal_curve* curve);

/* ---- Multi-modal fusion ------------------------------------------------ */

IMBCAL_API imbcal_status imbcal_fusion_create(imbcal_fusion** out);
/* Copies its inputs. n_delta == 1 for a scalar delta, else one per row. */
IMBCAL_API imbcal_status imbcal_fusion_add_modality(imbcal_fusion* fusion,
                                                    const imbcal_matrix* logits,
                                                    const double* delta, size_t n_delta,
                                                    const imbcal_prior* source,
                                                    const imbcal_prior* target);
IMBCAL_API size_t imbcal_fusion_size(const imbcal_fusion* fusion);
/* Calibrated posterior of one modality. */
IMBCAL_API imbcal_status imbcal_fusion_calibrated(const imbcal_fusion* fusion, size_t index,
                                                  double lambda, imbcal_matrix** out);
/* Per-modality calibration with a shared lambda, then noisy-or. */
IMBCAL_API imbcal_status imbcal_fusion_run(const imbcal_fusion* fusion, double lambda,
                                           imbcal_matrix** out);
IMBCAL_API void imbcal_fusion_free(imbcal_fusion* fusion);

/* Noisy-or of M probability matrices of equal shape. */
IMBCAL_API imbcal_status imbcal_noisy_or(const imbcal_matrix* const* posteriors, size_t count,
                                         imbcal_matrix** out);

/* ---- Gaussian Bayes-risk oracle ---------------------------------------- */

/* means (0, 2), std 1, source prior (0.9, 0.1), uniform target. */
IMBCAL_API imbcal_status imbcal_task_canonical(imbcal_task** out);
/* Key-value text: means, stds, source_prior, target_prior, [n_train,
 * n_val, n_test]. */
IMBCAL_API imbcal_status imbcal_task_parse(const char* text, imbcal_task** out);
IMBCAL_API imbcal_status imbcal_task_load(const char* path, imbcal_task** out);
IMBCAL_API void imbcal_task_free(imbcal_task* task);

/* Rebalanced and source Bayes rules, their exact risks under the target
 * prior, a threshold sweep at `resolution`, and empirical risks on n_test
 * samples drawn with `seed`. `risk_curve` (nullable) gets (threshold, risk). */
IMBCAL_API imbcal_status imbcal_oracle_run(const imbcal_task* task, double resolution,
                                           uint64_t seed, imbcal_report** report,
                                           imbcal_curve** risk_curve);

/* ---- Toy experiment ---------------------------------------------------- */

typedef struct imbcal_toy_config {
  imbcal_toy_shape shape;
  size_t majority_size;   /* 2500 */
  double imbalance_ratio; /* 9 */
  double noise;         /* 0.1 */
  uint64_t seed;
  double val_fraction;  /* 0.2 */
  double test_fraction; /* 0.2 */
  size_t hidden_width;  /* 32 */
  size_t epochs;        /* 2000 */
  double learning_rate; /* 0.2 for two moons, 0.05 for circle */
  imbcal_metric metric; /* mean accuracy */
  imbcal_search_config search;
  size_t grid_resolution; /* 100 */
} imbcal_toy_config;

/* Defaults for `shape`; unknown shapes fall back to two moons. */
IMBCAL_API imbcal_toy_config imbcal_toy_config_default(imbcal_toy_shape shape);
/* Generate, train, search lambda, and evaluate. */
IMBCAL_API imbcal_status imbcal_toy_run(const imbcal_toy_config* config, imbcal_toy_result** out);
/* Borrowed; valid until the result is freed. */
IMBCAL_API const imbcal_report* imbcal_toy_result_report(const imbcal_toy_result* result);
/* Writes dataset.csv, boundary.csv, curve.csv, report.json and, when
 * write_svg is nonzero, boundary.svg into an existing directory. */
IMBCAL_API imbcal_status imbcal_toy_result_save(const imbcal_toy_result* result,
                                                const char* out_dir, int write_svg);
IMBCAL_API void imbcal_toy_result_free(imbcal_toy_result* result);

#ifdef __cplusplus
}
#endif

#endif /* IMBCAL_IMBCAL_H_ */
