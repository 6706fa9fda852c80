#ifndef PRIORLIFT_H
#define PRIORLIFT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define PL_API __declspec(dllexport)
#else
#  define PL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pl_status {
  PL_OK = 0,
  PL_ERR_PARSE,
  PL_ERR_SCHEMA,
  PL_ERR_INVALID_DATASET,
  PL_ERR_RANGE,
  PL_ERR_SHAPE,
  PL_ERR_IO,
  PL_ERR_CONVERGENCE,
  PL_ERR_SINGULAR_DESIGN,
  PL_ERR_DEGENERATE_CLASS,
  PL_ERR_SINGULAR_INFORMATION,
  PL_ERR_DEGENERATE_PRIOR,
  PL_ERR_EMPTY_REGION,
  PL_ERR_COVERAGE,
  PL_ERR_CONFIG,
  PL_ERR_INVALID_ARGUMENT,
  PL_ERR_INTERNAL
} pl_status;

typedef struct pl_dataset pl_dataset;
typedef struct pl_model pl_model;
typedef struct pl_curve pl_curve;

PL_API const char* pl_version(void);
/* Stable snake_case name of a status ("ok", "degenerate_class", ...). */
PL_API const char* pl_status_string(pl_status status);
/* Message of the last failed call on this thread; "" if none. */
PL_API const char* pl_last_error(void);
/* Frees strings returned through char** out-parameters. */
PL_API void pl_string_free(char* s);

/* ---- datasets ---- */

/* features: comma-separated column names. label may be NULL (no labels).
   rule: "", "eq:1", "le:9", ... (NULL = categorical labels). */
typedef struct pl_column_spec {
  const char* features;
  const char* label;
  const char* rule;
} pl_column_spec;

typedef struct pl_dataset_info {
  size_t size;
  size_t labeled;
  size_t feature_count;
  size_t class_count;
  int has_truth;
} pl_dataset_info;

PL_API pl_status pl_dataset_load_csv(const char* path, const pl_column_spec* spec, pl_dataset** out);
/* recipe: "pima", "abalone", "census". */
PL_API pl_status pl_dataset_load_recipe(const char* path, const char* recipe, pl_dataset** out);
/* Column spec read from a key=value file. */
PL_API pl_status pl_dataset_load_config(const char* path, const char* config_path, pl_dataset** out);
/* Row-major features; labels[i] < 0 marks row i unlabeled. */
PL_API pl_status pl_dataset_from_arrays(const double* features, size_t rows, size_t feature_count,
                                        const int* labels, size_t class_count, pl_dataset** out);
PL_API pl_status pl_dataset_partition(const pl_dataset* data, size_t labeled, uint64_t seed,
                                      pl_dataset** out);
PL_API pl_status pl_dataset_get_info(const pl_dataset* data, pl_dataset_info* out);
/* Returns the stored name of class j. */
PL_API pl_status pl_dataset_class_name(const pl_dataset* data, int class_index, char** out);
/* Class index whose name is `name`, else `name` parsed as an index. */
PL_API pl_status pl_dataset_find_class(const pl_dataset* data, const char* name, int* out);
PL_API pl_status pl_dataset_to_csv(const pl_dataset* data, char** out);
PL_API void pl_dataset_free(pl_dataset* data);

/* ---- model ---- */

PL_API pl_status pl_model_fit(const pl_dataset* data, pl_model** out);
/* Fits class j only. */
PL_API pl_status pl_model_fit_class(const pl_dataset* data, int class_index, pl_model** out);
/* JSON array with one object per fitted class. */
PL_API pl_status pl_model_to_json(const pl_model* model, char** out);
PL_API void pl_model_free(pl_model* model);

/* ---- prior estimation ---- */

typedef struct pl_prior_estimate {
  int class_index;
  size_t n;
  size_t r;
  double q_hat;
  double var_g;
  double var_g_term;
  double sandwich_term;
  double avar;
  double std_error;
  double alpha;
  double ci_lower;
  double ci_upper;
} pl_prior_estimate;

PL_API pl_status pl_estimate_prior(const pl_dataset* data, const pl_model* model, int class_index,
                                   double alpha, pl_prior_estimate* out);
PL_API pl_status pl_estimate_classical(const pl_dataset* data, int class_index, double alpha,
                                       pl_prior_estimate* out);
/* (1/r - 1/n) var_g for a semi-supervised estimate. */
PL_API pl_status pl_variance_reduction(const pl_prior_estimate* estimate, double* out);
PL_API pl_status pl_labeled_only_avar(const pl_prior_estimate* estimate, double* out);
PL_API pl_status pl_prior_estimate_to_json(const pl_prior_estimate* estimate, char** out);

/* ---- subclass estimation ---- */

typedef struct pl_subclass_estimate {
  int class_index;
  size_t n;
  size_t r;
  size_t in_region;
  double q_hat_w;
  double p_hat_w;
  double v_hat;
  double var_w;
  double var_term;
  double sandwich_term;
  double avar;
  double std_error;
  double alpha;
  double ci_lower;
  double ci_upper;
} pl_subclass_estimate;

/* regions: "idx:lo:hi" constraints, all of which must hold. */
PL_API pl_status pl_estimate_subclass(const pl_dataset* data, const pl_model* model, int class_index,
                                      const char* const* regions, size_t region_count, double alpha,
                                      pl_subclass_estimate* out);
PL_API pl_status pl_classical_subclass(const pl_dataset* data, int class_index,
                                       const char* const* regions, size_t region_count, double alpha,
                                       pl_subclass_estimate* out);
/* Human-readable form of a region list. */
PL_API pl_status pl_describe_region(const char* const* regions, size_t region_count, char** out);
PL_API pl_status pl_subclass_estimate_to_json(const pl_subclass_estimate* estimate, char** out);

/* ---- discrete estimation ---- */

typedef struct pl_discrete_estimate {
  int class_index;
  size_t n;
  size_t cell_count;
  double q_hat;
  double avar;
  int avar_floored;
  double std_error;
  double alpha;
  double ci_lower;
  double ci_upper;
} pl_discrete_estimate;

PL_API pl_status pl_estimate_discrete(const pl_dataset* data, int class_index, double alpha,
                                      pl_discrete_estimate* out);
/* Full estimate including per-cell p and d. */
PL_API pl_status pl_estimate_discrete_json(const pl_dataset* data, int class_index, double alpha,
                                           char** out);
/* Value columns, M, N and T_j per class. */
PL_API pl_status pl_discrete_table_csv(const pl_dataset* data, char** out);

/* ---- diagnostics ---- */

typedef enum pl_recommendation {
  PL_USEFUL = 0,
  PL_MARGINAL = 1,
  PL_NOT_USEFUL = 2
} pl_recommendation;

typedef struct pl_diagnostics {
  int class_index;
  double q_hat;
  double baseline_error;
  double misclassification_rate;
  double eta;
  int eta_clamped;
  double sigma;
  pl_recommendation recommendation;
  double useful_threshold;
  double marginal_threshold;
} pl_diagnostics;

PL_API pl_status pl_diagnose(const pl_dataset* data, const pl_model* model, int class_index,
                             double useful_threshold, double marginal_threshold, pl_diagnostics* out);
PL_API const char* pl_recommendation_string(pl_recommendation r);
PL_API pl_status pl_diagnostics_to_json(const pl_diagnostics* report, char** out);

/* ---- evaluation harness ---- */

typedef struct pl_eval_config {
  size_t replicates;  /* 0 = 1000 */
  const char* grid;   /* NULL or "" = default grid */
  uint64_t seed;
  unsigned threads;   /* 0 = PRIOR_LIFT_THREADS, then hardware */
} pl_eval_config;

typedef struct pl_curve_record {
  size_t labeled;
  size_t unlabeled;
  double mse_semi;
  double mse_classical;
  double ratio; /* NaN when undefined */
  int ratio_defined;
  size_t replicates_used;
  size_t failures;
  int valid;
} pl_curve_record;

PL_API pl_status pl_evaluate(const pl_dataset* data, int class_index, const pl_eval_config* config,
                             pl_curve** out);
PL_API pl_status pl_curve_smooth(const pl_curve* curve, size_t window, pl_curve** out);
PL_API size_t pl_curve_size(const pl_curve* curve);
PL_API pl_status pl_curve_record_at(const pl_curve* curve, size_t k, pl_curve_record* out);
PL_API pl_status pl_curve_to_csv(const pl_curve* curve, char** out);
PL_API pl_status pl_curve_to_json(const pl_curve* curve, char** out);
PL_API void pl_curve_free(pl_curve* curve);

#ifdef __cplusplus
}
#endif

#endif
