#ifndef MAXENT_MAXENT_H
#define MAXENT_MAXENT_H

/*
 * C interface to the maximum-entropy matrix library.
 *
 * Objects are opaque handles released with the matching *_free function
 * (which accept NULL). Every fallible call returns a maxent_status; on failure
 * maxent_last_error() describes the problem until the next call on the same
 * thread. Enumerated options are passed as the strings used on the command
 * line: formats "fimi" | "csv" | "edgelist", domains "binary" | "nonneg_int" |
 * "nonneg_real", structures "database" | "directed" | "undirected", solvers
 * "newton" | "pgd", delta modes "unit" | "integer" | "real".
 */

#include <stddef.h>
#include <stdint.h>

#if defined(MAXENT_BUILDING_LIBRARY)
#define MAXENT_API __attribute__((visibility("default")))
#else
#define MAXENT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum maxent_status {
  MAXENT_OK = 0,
  MAXENT_ERR_USAGE = 1,
  MAXENT_ERR_INPUT = 2,
  MAXENT_ERR_NOT_CONVERGED = 3,
  MAXENT_ERR_INFEASIBLE = 4,
  MAXENT_ERR_INTERNAL = 5
} maxent_status;

typedef struct maxent_matrix maxent_matrix;
typedef struct maxent_margins maxent_margins;
typedef struct maxent_model maxent_model;
typedef struct maxent_trace maxent_trace;
typedef struct maxent_report maxent_report;

MAXENT_API const char* maxent_last_error(void);

/* Matrices. Zero rows/cols in the layout are inferred from the file. */
typedef struct maxent_layout {
  const char* domain;
  const char* structure;
  int self_loops;
  size_t rows;
  size_t cols;
} maxent_layout;

MAXENT_API maxent_status maxent_matrix_read(const char* path, const char* format, const maxent_layout* layout,
                                            maxent_matrix** out);
MAXENT_API maxent_status maxent_matrix_write(const maxent_matrix* m, const char* path, const char* format);
MAXENT_API maxent_status maxent_matrix_shape(const maxent_matrix* m, size_t* rows, size_t* cols);
MAXENT_API maxent_status maxent_matrix_get(const maxent_matrix* m, size_t i, size_t j, double* value);
MAXENT_API void maxent_matrix_free(maxent_matrix* m);

/* Margin targets. */
MAXENT_API maxent_status maxent_margins_from_matrix(const maxent_matrix* m, maxent_margins** out);
MAXENT_API maxent_status maxent_margins_read(const char* path, const char* structure, maxent_margins** out);
MAXENT_API maxent_status maxent_margins_write(const maxent_margins* t, const char* path);
/* Number of row targets and column targets (0 columns when symmetric). */
MAXENT_API maxent_status maxent_margins_size(const maxent_margins* t, size_t* rows, size_t* cols);
MAXENT_API void maxent_margins_free(maxent_margins* t);

/* Fitting. max_bins == 0 disables binning. */
typedef struct maxent_fit_config {
  const char* solver;
  double tol;
  size_t max_iter;
  size_t max_bins;
} maxent_fit_config;

MAXENT_API void maxent_fit_config_default(maxent_fit_config* config);

/*
 * Fits a model to the targets. When the iteration limit is hit, *model and
 * *trace are still set and MAXENT_ERR_NOT_CONVERGED is returned. `trace` may
 * be NULL.
 */
MAXENT_API maxent_status maxent_fit(const maxent_margins* targets, const char* domain, const char* structure,
                                    int self_loops, const maxent_fit_config* config, maxent_model** model,
                                    maxent_trace** trace);
MAXENT_API maxent_status maxent_trace_write_csv(const maxent_trace* trace, const char* path);
/* Index of the last recorded iteration (0 when the start point was optimal). */
MAXENT_API size_t maxent_trace_iterations(const maxent_trace* trace);
MAXENT_API void maxent_trace_free(maxent_trace* trace);

/* Models. */
MAXENT_API maxent_status maxent_model_save(const maxent_model* model, const char* path);
MAXENT_API maxent_status maxent_model_load(const char* path, maxent_model** out);
/* Domain and structure names point to static storage. */
MAXENT_API maxent_status maxent_model_describe(const maxent_model* model, const char** domain,
                                               const char** structure, int* self_loops, size_t* rows,
                                               size_t* cols);
MAXENT_API maxent_status maxent_model_expected(const maxent_model* model, size_t i, size_t j, double* mean);
MAXENT_API maxent_status maxent_model_log_prob(const maxent_model* model, const maxent_matrix* m, double* out);
MAXENT_API void maxent_model_free(maxent_model* model);

/* Sampling: sample k of a run is written to <out_dir>/sample_<k>.<ext>. */
MAXENT_API maxent_status maxent_sample_one(const maxent_model* model, uint64_t seed, uint64_t index,
                                           maxent_matrix** out);
MAXENT_API maxent_status maxent_sample_to_dir(const maxent_model* model, size_t count, uint64_t seed,
                                              const char* out_dir, const char* format);

/* Swap randomization. `accepted` may be NULL. */
MAXENT_API maxent_status maxent_randomize(const maxent_matrix* m, size_t steps, uint64_t seed, const char* delta_mode,
                                          maxent_matrix** out, size_t* accepted);

/* Closed frequent itemsets: total number of nonempty closed itemsets. */
MAXENT_API maxent_status maxent_count_closed(const maxent_matrix* m, size_t min_support, size_t* total);

/* Assessment. threads == 0 uses the hardware concurrency. */
MAXENT_API maxent_status maxent_assess(const maxent_matrix* m, const maxent_model* model, size_t min_support,
                                       size_t n_samples, uint64_t seed, unsigned threads, maxent_report** out);
MAXENT_API maxent_status maxent_report_write(const maxent_report* report, const char* path);
MAXENT_API double maxent_report_global_p(const maxent_report* report);
MAXENT_API void maxent_report_free(maxent_report* report);

/* Power-law degree sequences. d_max == 0 means n - 1. */
MAXENT_API maxent_status maxent_degrees(size_t n, double exponent, uint64_t seed, size_t d_max, int even_total,
                                        maxent_margins** out);

#ifdef __cplusplus
}
#endif

#endif
