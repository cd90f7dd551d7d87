/*
 * sess - saliency map enhancement over superpixel similarity.
 *
 * C interface to the enhancement pipeline, the evaluation metrics and the
 * configuration machinery. All functions return sess_status; on failure
 * sess_last_error() carries a human-readable message for the calling thread.
 * Objects are opaque handles freed with their matching *_free function.
 *
 * Handles are immutable after creation (except sess_config) and may be shared
 * across threads; concurrent calls on distinct images are safe.
 */

#ifndef SESS_H
#define SESS_H

#include <stddef.h>

#if defined(_WIN32)
#define SESS_API __declspec(dllexport)
#else
#define SESS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sess_status {
    SESS_OK = 0,
    SESS_ERROR_INVALID_ARGUMENT = 1, /* bad parameter, config value or key */
    SESS_ERROR_IO = 2,               /* missing file or read/write failure */
    SESS_ERROR_FORMAT = 3,           /* file exists but does not decode */
    SESS_ERROR_DIMENSION_MISMATCH = 4,
    SESS_ERROR_EMPTY_GROUND_TRUTH = 5, /* metrics need foreground pixels */
    SESS_ERROR_INTERNAL = 6,
} sess_status;

typedef struct sess_image sess_image;   /* 8-bit RGB raster */
typedef struct sess_map sess_map;       /* per-pixel saliency in [0,1] */
typedef struct sess_config sess_config; /* pipeline configuration */
typedef struct sess_result sess_result; /* full pipeline output bundle */

/* Library version as "major.minor.patch". */
SESS_API const char* sess_version(void);

/* Message for the most recent failure on this thread ("" if none). */
SESS_API const char* sess_last_error(void);

/* Short name of a status code. */
SESS_API const char* sess_status_name(sess_status status);

/* ---- images and maps ---------------------------------------------------- */

/* Decodes a PNG or PPM/PGM file into RGB. */
SESS_API sess_status sess_image_load(const char* path, sess_image** out);
/* Wraps a copy of interleaved 8-bit RGB data (row-major, 3 bytes/pixel). */
SESS_API sess_status sess_image_create(int width, int height, const unsigned char* rgb,
                                       sess_image** out);
SESS_API sess_status sess_image_save(const sess_image* image, const char* path);
SESS_API int sess_image_width(const sess_image* image);
SESS_API int sess_image_height(const sess_image* image);
SESS_API void sess_image_free(sess_image* image);

/* Decodes an 8-bit grayscale raster (or RGB with equal channels) to [0,1]. */
SESS_API sess_status sess_map_load(const char* path, sess_map** out);
/* Wraps a copy of row-major double data; values must be finite and in [0,1]. */
SESS_API sess_status sess_map_create(int width, int height, const double* values, sess_map** out);
/* Writes an 8-bit grayscale PNG or PGM (pixel = round(value * 255)). */
SESS_API sess_status sess_map_save(const sess_map* map, const char* path);
SESS_API int sess_map_width(const sess_map* map);
SESS_API int sess_map_height(const sess_map* map);
/* Borrowed pointer to width*height row-major values; valid until free. */
SESS_API const double* sess_map_values(const sess_map* map);
SESS_API void sess_map_free(sess_map* map);

/* ---- configuration ------------------------------------------------------ */

/* Default configuration (the "u2net" preset). */
SESS_API sess_status sess_config_create(sess_config** out);
/* Parses a `key = value` file; errors carry the offending line number. */
SESS_API sess_status sess_config_parse_file(const char* path, sess_config** out);
/* Applies one assignment, e.g. sess_config_set(cfg, "preset", "basnet"). */
SESS_API sess_status sess_config_set(sess_config* cfg, const char* key, const char* value);
/* Renders the effective configuration as parseable text. Writes up to
 * capacity-1 bytes plus a terminator and stores the full length (excluding
 * the terminator) in *length; a NULL buffer just measures. */
SESS_API sess_status sess_config_format(const sess_config* cfg, char* buffer, size_t capacity,
                                        size_t* length);
SESS_API void sess_config_free(sess_config* cfg);

/* ---- enhancement -------------------------------------------------------- */

/* Runs the full pipeline on an image and its saliency map. */
SESS_API sess_status sess_enhance(const sess_image* image, const sess_map* saliency,
                                  const sess_config* cfg, sess_map** out);

/* As sess_enhance, but keeps every intermediate product. */
SESS_API sess_status sess_enhance_full(const sess_image* image, const sess_map* saliency,
                                       const sess_config* cfg, sess_result** out);

SESS_API const sess_map* sess_result_final(const sess_result* result);
SESS_API int sess_result_iteration_count(const sess_result* result);
SESS_API const sess_map* sess_result_iteration(const sess_result* result, int index);
SESS_API const sess_map* sess_result_integrated(const sess_result* result);
SESS_API const sess_map* sess_result_color_pass(const sess_result* result);
/* NULL when deep reintroduction was disabled. */
SESS_API const sess_map* sess_result_deep_reintro(const sess_result* result);
/* Writes the final segmentation as a 16-bit label PNG. */
SESS_API sess_status sess_result_save_labels(const sess_result* result, const char* path);
/* Writes the input image with superpixel boundaries marked. */
SESS_API sess_status sess_result_save_boundaries(const sess_result* result,
                                                 const sess_image* image, const char* path);
SESS_API void sess_result_free(sess_result* result);

/* ---- evaluation --------------------------------------------------------- */

typedef struct sess_metrics_report {
    double mae;
    double max_f;
    double weighted_f;
    double s_measure;
    double e_measure;
} sess_metrics_report;

/* Scores a prediction against a ground-truth mask (binarized at 0.5).
 * Fails with SESS_ERROR_EMPTY_GROUND_TRUTH when the mask has no foreground. */
SESS_API sess_status sess_evaluate(const sess_map* prediction, const sess_map* ground_truth,
                                   sess_metrics_report* out);

/* Precision/recall at all 256 thresholds; both arrays hold 256 doubles. */
SESS_API sess_status sess_evaluate_pr(const sess_map* prediction, const sess_map* ground_truth,
                                      double* precision, double* recall);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SESS_H */
