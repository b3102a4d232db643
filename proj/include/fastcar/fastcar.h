#ifndef FASTCAR_FASTCAR_H
#define FASTCAR_FASTCAR_H

/* C interface to the hybrid label codec and the experiment commands.
 *
 * Functions returning fastcar_status leave a message for the calling thread
 * in fastcar_last_error() on failure. Strings handed out by the library are
 * released with fastcar_string_free(). */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(FASTCAR_BUILDING_LIBRARY)
#    define FASTCAR_API __declspec(dllexport)
#  else
#    define FASTCAR_API __declspec(dllimport)
#  endif
#else
#  define FASTCAR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fastcar_status {
  FASTCAR_OK = 0,
  FASTCAR_E_INVALID_ARGUMENT,
  FASTCAR_E_DEGENERATE_INTERVALS,
  FASTCAR_E_INVALID_U,
  FASTCAR_E_CLASS_OUT_OF_RANGE,
  FASTCAR_E_PROPERTY_OUT_OF_INTERVAL,
  FASTCAR_E_NON_FINITE_INPUT,
  FASTCAR_E_NO_OVERLAP_POSSIBLE,
  FASTCAR_E_LENGTH_MISMATCH,
  FASTCAR_E_EMPTY_INPUT,
  FASTCAR_E_ZERO_TRUE_VALUE,
  FASTCAR_E_MISSING_HEADER,
  FASTCAR_E_MALFORMED_ROW,
  FASTCAR_E_EMPTY_FILE,
  FASTCAR_E_NON_NUMERIC_PROPERTY,
  FASTCAR_E_INTERVAL_COUNT_MISMATCH,
  FASTCAR_E_CLASS_TOO_SMALL,
  FASTCAR_E_DIM_MISMATCH,
  FASTCAR_E_NON_FINITE_LOSS,
  FASTCAR_E_INSUFFICIENT_EPOCHS,
  FASTCAR_E_SCHEMA_VIOLATION,
  FASTCAR_E_IO,
  FASTCAR_E_PARSE,
  FASTCAR_E_INTERNAL = 99
} fastcar_status;

typedef enum fastcar_mode {
  FASTCAR_MODE_PAPER_EXACT = 0,
  FASTCAR_MODE_STRICT_SPACING = 1
} fastcar_mode;

typedef struct fastcar_interval {
  double lo;
  double hi;
} fastcar_interval;

typedef struct fastcar_transform_config {
  double u;
  int centering;
  fastcar_mode mode;
} fastcar_transform_config;

typedef struct fastcar_codec fastcar_codec;
typedef struct fastcar_dataset fastcar_dataset;

/* Receives one log line per call; `user` is passed through untouched. */
typedef void (*fastcar_log_fn)(const char* line, void* user);

FASTCAR_API const char* fastcar_version(void);
FASTCAR_API const char* fastcar_status_name(fastcar_status status);
/* Message of the last failure on this thread; empty when none. */
FASTCAR_API const char* fastcar_last_error(void);
FASTCAR_API void fastcar_string_free(char* text);

/* u = 1.5, centering on, PaperExact. */
FASTCAR_API fastcar_transform_config fastcar_transform_config_default(void);
/* Accepts "paper_exact", "strict_spacing", "paper", "strict". */
FASTCAR_API fastcar_status fastcar_mode_parse(const char* text, fastcar_mode* out);

/* Codec */
FASTCAR_API fastcar_status fastcar_codec_fit(const fastcar_interval* bounds,
                                             size_t n_classes,
                                             const fastcar_transform_config* config,
                                             fastcar_codec** out);
/* Zero-offset ablation codec. */
FASTCAR_API fastcar_status fastcar_codec_bad(const fastcar_interval* bounds,
                                             size_t n_classes, int centering,
                                             fastcar_codec** out);
FASTCAR_API fastcar_status fastcar_codec_fit_dataset(const fastcar_dataset* dataset,
                                                     const fastcar_transform_config* config,
                                                     fastcar_codec** out);
FASTCAR_API void fastcar_codec_free(fastcar_codec* codec);

/* class_index is 1-based. */
FASTCAR_API fastcar_status fastcar_codec_encode(const fastcar_codec* codec,
                                                int class_index, double property,
                                                double* hybrid);
FASTCAR_API fastcar_status fastcar_codec_decode(const fastcar_codec* codec,
                                                double hybrid, int* class_index,
                                                double* property, int* clamped);

FASTCAR_API size_t fastcar_codec_size(const fastcar_codec* codec);
FASTCAR_API fastcar_status fastcar_codec_info(const fastcar_codec* codec,
                                              double* delta, double* shift);
/* Both arrays must hold fastcar_codec_size() entries. */
FASTCAR_API fastcar_status fastcar_codec_offsets(const fastcar_codec* codec,
                                                 double* offsets, size_t capacity);
FASTCAR_API fastcar_status fastcar_codec_transformed_bounds(const fastcar_codec* codec,
                                                            fastcar_interval* bounds,
                                                            size_t capacity);

/* Writes the violation count; `report_json` may be NULL. */
FASTCAR_API fastcar_status fastcar_codec_validate(const fastcar_codec* codec,
                                                  size_t* n_violations,
                                                  char** report_json);
FASTCAR_API fastcar_status fastcar_codec_to_json(const fastcar_codec* codec,
                                                 char** json);
FASTCAR_API fastcar_status fastcar_codec_from_json(const char* json,
                                                   fastcar_codec** out);

/* Dataset */
FASTCAR_API fastcar_status fastcar_dataset_load_csv(const char* path,
                                                    fastcar_dataset** out);
FASTCAR_API void fastcar_dataset_free(fastcar_dataset* dataset);
FASTCAR_API size_t fastcar_dataset_size(const fastcar_dataset* dataset);
FASTCAR_API size_t fastcar_dataset_classes(const fastcar_dataset* dataset);
FASTCAR_API size_t fastcar_dataset_feature_dim(const fastcar_dataset* dataset);

/* Commands. Each returns a process exit code: 0 ok, 1 error,
 * 2 completed with violations. `log` may be NULL. */
FASTCAR_API int fastcar_cmd_fit_codec(const char* labels_csv,
                                      const fastcar_transform_config* config,
                                      const char* out_path,
                                      const char* report_path,
                                      fastcar_log_fn log, void* user);
FASTCAR_API int fastcar_cmd_transform(const char* labels_csv,
                                      const char* codec_path,
                                      const char* out_csv,
                                      fastcar_log_fn log, void* user);
FASTCAR_API int fastcar_cmd_decode(const char* pred_csv, const char* codec_path,
                                   const char* out_csv, fastcar_log_fn log,
                                   void* user);
/* `seed` and `output_dir` override the config when non-NULL. */
FASTCAR_API int fastcar_cmd_experiment(const char* config_path,
                                       const unsigned long long* seed,
                                       const char* output_dir,
                                       fastcar_log_fn log, void* user);

#ifdef __cplusplus
}
#endif

#endif /* FASTCAR_FASTCAR_H */
