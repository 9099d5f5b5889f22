/*
 * C interface to the cross-entropy clustering library.
 *
 * Every object is an opaque handle owned by the caller and released with the
 * matching *_destroy function (which accepts NULL). Calls that can fail
 * return a cec_status; on failure cec_last_error() describes the problem for
 * the calling thread until its next failing call. Strings returned through
 * char** out-parameters are released with cec_string_free.
 */
#ifndef CEC_CEC_H
#define CEC_CEC_H

#include <stddef.h>
#include <stdint.h>

#if defined(CEC_BUILDING_LIBRARY)
#define CEC_API __attribute__((visibility("default")))
#else
#define CEC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cec_status {
  CEC_OK = 0,
  CEC_ERR_INVALID_ARGUMENT = 1,
  CEC_ERR_CONFIG = 2,
  CEC_ERR_IO = 3,
  CEC_ERR_DIMENSION_MISMATCH = 4,
  CEC_ERR_INVALID_MATRIX = 5,
  CEC_ERR_INVALID_SPECTRUM = 6,
  CEC_ERR_EMPTY_CLUSTER = 7,
  CEC_ERR_DEGENERATE_CLUSTER = 8,
  CEC_ERR_EMPTY_INPUT = 9,
  CEC_ERR_CONSTANT_IMAGE = 10,
  CEC_ERR_UNSUPPORTED_DIMENSION = 11,
  CEC_ERR_INTERNAL = 12
} cec_status;

typedef enum cec_polarity { CEC_POLARITY_DARK = 0, CEC_POLARITY_BRIGHT = 1 } cec_polarity;

/* ONLINE: a cluster is dissolved during a sweep when that lowers the energy.
 * SWEEP: after each sweep every underweight cluster is removed outright. */
typedef enum cec_removal { CEC_REMOVAL_ONLINE = 0, CEC_REMOVAL_SWEEP = 1 } cec_removal;

typedef enum cec_threshold_method { CEC_THRESHOLD_OTSU = 0, CEC_THRESHOLD_FIXED = 1 } cec_threshold_method;

typedef struct cec_points_t* cec_points;
typedef struct cec_image_t* cec_image;
typedef struct cec_mask_t* cec_mask;
typedef struct cec_config_t* cec_config;
typedef struct cec_result_t* cec_result;
typedef struct cec_report_t* cec_report;

CEC_API const char* cec_version(void);
/* Error kind name as used in "error:<kind>:" diagnostics, e.g. "ConfigError". */
CEC_API const char* cec_status_kind(cec_status status);
CEC_API const char* cec_last_error(void);
CEC_API void cec_string_free(char* s);

/* ---- point clouds ------------------------------------------------------ */

/* `coords` holds count*dim values, point-major. */
CEC_API cec_status cec_points_create(size_t dim, const double* coords, size_t count, cec_points* out);
CEC_API cec_status cec_points_load_csv(const char* path, cec_points* out);
CEC_API cec_status cec_points_save_csv(cec_points points, const char* path);
CEC_API size_t cec_points_count(cec_points points);
CEC_API size_t cec_points_dim(cec_points points);
CEC_API const double* cec_points_data(cec_points points);
CEC_API void cec_points_destroy(cec_points points);

/* ---- images ------------------------------------------------------------ */

/* PNG (gray or RGB, reduced to luma) or binary PGM, detected by signature. */
CEC_API cec_status cec_image_load(const char* path, cec_image* out);
CEC_API cec_status cec_image_create(size_t width, size_t height, const uint8_t* pixels, cec_image* out);
CEC_API size_t cec_image_width(cec_image image);
CEC_API size_t cec_image_height(cec_image image);
CEC_API void cec_image_destroy(cec_image image);

/* `fixed_threshold` is used only with CEC_THRESHOLD_FIXED. */
CEC_API cec_status cec_image_binarize(cec_image image, cec_threshold_method method, int fixed_threshold,
                                      cec_polarity polarity, int despeckle, cec_mask* out);
CEC_API size_t cec_mask_width(cec_mask mask);
CEC_API size_t cec_mask_height(cec_mask mask);
CEC_API size_t cec_mask_foreground_count(cec_mask mask);
CEC_API int cec_mask_threshold(cec_mask mask);
CEC_API cec_status cec_mask_to_points(cec_mask mask, cec_points* out);
CEC_API void cec_mask_destroy(cec_mask mask);

/* ---- configuration ----------------------------------------------------- */

CEC_API cec_status cec_config_create(cec_config* out);
CEC_API void cec_config_destroy(cec_config config);
/* `spec` uses the family grammar: full | diag | spherical | fixed-radius:<r> |
 * fixed-eigs:<l1>,...,<lN> | fixed-cov:@<path>. */
CEC_API cec_status cec_config_add_family(cec_config config, const char* spec, size_t initial_clusters);
/* "<spec>:<count>" */
CEC_API cec_status cec_config_add_pool_entry(cec_config config, const char* entry);
CEC_API size_t cec_config_family_count(cec_config config);
CEC_API size_t cec_config_warning_count(cec_config config);
CEC_API const char* cec_config_warning(cec_config config, size_t index);
CEC_API cec_status cec_config_set_min_weight(cec_config config, double min_weight);
CEC_API cec_status cec_config_set_removal(cec_config config, cec_removal removal);
CEC_API cec_status cec_config_set_max_sweeps(cec_config config, int max_sweeps);
CEC_API cec_status cec_config_set_restarts(cec_config config, int restarts);
CEC_API cec_status cec_config_set_seed(cec_config config, uint64_t seed);
CEC_API cec_status cec_config_set_epsilon(cec_config config, double epsilon);
/* 0 restores the per-family default (N+1 for full/diag/spherical, else 1). */
CEC_API cec_status cec_config_set_min_cluster_size(cec_config config, size_t min_cluster_size);

/* ---- clustering -------------------------------------------------------- */

CEC_API cec_status cec_run(cec_points points, cec_config config, cec_result* out);
CEC_API size_t cec_result_cluster_count(cec_result result);
CEC_API size_t cec_result_dim(cec_result result);
CEC_API double cec_result_energy(cec_result result);
CEC_API int cec_result_sweeps(cec_result result);
CEC_API int cec_result_best_restart(cec_result result);
CEC_API double cec_result_elapsed_ms(cec_result result);
/* Per input point, the cluster index; length cec_result_label_count. */
CEC_API const int* cec_result_labels(cec_result result);
CEC_API size_t cec_result_label_count(cec_result result);
/* `mean` receives dim values and `covariance` dim*dim row-major values;
 * either may be NULL. */
CEC_API cec_status cec_result_cluster(cec_result result, size_t index, double* weight, double* mean,
                                      double* covariance);
CEC_API size_t cec_result_warning_count(cec_result result);
CEC_API const char* cec_result_warning(cec_result result, size_t index);
CEC_API void cec_result_destroy(cec_result result);

/* ---- reports ----------------------------------------------------------- */

typedef struct cec_input_info {
  const char* path;      /* may be NULL */
  const char* kind;      /* "csv", "png", "pgm"; NULL means "memory" */
  const char* threshold; /* requested threshold text, image inputs only */
  const char* polarity;  /* "dark" or "bright", image inputs only */
  cec_mask mask;         /* image inputs only; supplies width/height */
} cec_input_info;

CEC_API cec_status cec_report_create(cec_result result, cec_config config, cec_points points,
                                     const cec_input_info* info, int include_timing, cec_report* out);
/* JSON document with "schema": "cec-report/1". */
CEC_API cec_status cec_report_json(cec_report report, char** out);
/* SVG overlay. `points` adds a point layer colored by label; `mask` sizes the
 * canvas to the image. Both may be NULL. Fails with
 * CEC_ERR_UNSUPPORTED_DIMENSION unless the data are 2-D. */
CEC_API cec_status cec_report_svg(cec_report report, cec_points points, cec_mask mask, char** out);
CEC_API void cec_report_destroy(cec_report report);

#ifdef __cplusplus
}
#endif

#endif /* CEC_CEC_H */
