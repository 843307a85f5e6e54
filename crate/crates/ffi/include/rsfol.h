#ifndef RSFOL_H
#define RSFOL_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RsfolStatus {
  RSFOL_STATUS_OK = 0,
  RSFOL_STATUS_NULL_POINTER = 1,
  RSFOL_STATUS_INVALID_UTF8 = 2,
  RSFOL_STATUS_PARSE_ERROR = 3,
  RSFOL_STATUS_VOCABULARY_ERROR = 4,
  RSFOL_STATUS_IO_ERROR = 5,
  RSFOL_STATUS_SCHEMA_ERROR = 6,
  RSFOL_STATUS_INFERENCE_ERROR = 7,
  RSFOL_STATUS_NOT_FOUND = 8,
  RSFOL_STATUS_INVALID_ARGUMENT = 9,
  RSFOL_STATUS_PANIC = 10,
} RsfolStatus;

typedef enum RsfolVocab {
  RSFOL_VOCAB_DOTA = 0,
  RSFOL_VOCAB_FLOOD = 1,
} RsfolVocab;

/**
 * A loaded corpus of scenes.
 */
typedef struct RsfolCorpus RsfolCorpus;

/**
 * A parsed and normalized query.
 */
typedef struct RsfolQuery RsfolQuery;

/**
 * A ranking produced by [`rsfol_retrieve`].
 */
typedef struct RsfolRun RsfolRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library from the same thread.
 */
const char *rsfol_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void rsfol_string_free(char *s);

/**
 * Parses FOL text and validates it against the vocabulary.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum RsfolStatus rsfol_query_parse(const char *text,
                                   enum RsfolVocab vocab,
                                   struct RsfolQuery **out);

/**
 * Translates a sentence with the offline pattern translator.
 *
 * # Safety
 * As for [`rsfol_query_parse`].
 */
enum RsfolStatus rsfol_query_translate_offline(const char *text,
                                               enum RsfolVocab vocab,
                                               struct RsfolQuery **out);

/**
 * Writes the canonical FOL text of `query` to `out`.
 *
 * # Safety
 * `query` must be a live handle; `out` must be writable.
 */
enum RsfolStatus rsfol_query_render(const struct RsfolQuery *query, char **out);

/**
 * Number of distinct variables, or 0 for a null handle.
 *
 * # Safety
 * `query` must be null or a live handle.
 */
size_t rsfol_query_variable_count(const struct RsfolQuery *query);

/**
 * # Safety
 * `query` must be null or a handle not yet freed.
 */
void rsfol_query_free(struct RsfolQuery *query);

/**
 * Loads a scene file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum RsfolStatus rsfol_corpus_load(const char *path,
                                   enum RsfolVocab vocab,
                                   struct RsfolCorpus **out);

/**
 * Builds a corpus from scene-file JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum RsfolStatus rsfol_corpus_from_json(const char *json,
                                        enum RsfolVocab vocab,
                                        struct RsfolCorpus **out);

/**
 * Number of scenes, or 0 for a null handle.
 *
 * # Safety
 * `corpus` must be null or a live handle.
 */
size_t rsfol_corpus_len(const struct RsfolCorpus *corpus);

/**
 * # Safety
 * `corpus` must be null or a handle not yet freed.
 */
void rsfol_corpus_free(struct RsfolCorpus *corpus);

/**
 * Scores `query` against one scene and writes the probability.
 *
 * # Safety
 * Handles must be live; `image_id` NUL-terminated; `out_probability` writable.
 */
enum RsfolStatus rsfol_score(const struct RsfolQuery *query,
                             const struct RsfolCorpus *corpus,
                             const char *image_id,
                             double floor,
                             double *out_probability);

/**
 * Like [`rsfol_score`] but writes a JSON document with the probability,
 * witness and hypothesis counts.
 *
 * # Safety
 * As for [`rsfol_score`]; `out_json` must be writable.
 */
enum RsfolStatus rsfol_score_json(const struct RsfolQuery *query,
                                  const struct RsfolCorpus *corpus,
                                  const char *image_id,
                                  double floor,
                                  char **out_json);

/**
 * Ranks the corpus and keeps the best `k` scenes.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum RsfolStatus rsfol_retrieve(const struct RsfolQuery *query,
                                const struct RsfolCorpus *corpus,
                                size_t k,
                                double floor,
                                struct RsfolRun **out);

/**
 * Number of ranked entries, or 0 for a null handle.
 *
 * # Safety
 * `run` must be null or a live handle.
 */
size_t rsfol_run_len(const struct RsfolRun *run);

/**
 * Writes the image id and probability of entry `index` (0 = best).
 *
 * # Safety
 * `run` must be live; out-parameters must be writable.
 */
enum RsfolStatus rsfol_run_entry(const struct RsfolRun *run,
                                 size_t index,
                                 char **out_image_id,
                                 double *out_probability);

/**
 * Writes the whole run, witnesses included, as JSON.
 *
 * # Safety
 * `run` must be live; `out_json` must be writable.
 */
enum RsfolStatus rsfol_run_to_json(const struct RsfolRun *run, char **out_json);

/**
 * # Safety
 * `run` must be null or a handle not yet freed.
 */
void rsfol_run_free(struct RsfolRun *run);

/**
 * Ground sample distance in meters per pixel from camera parameters
 * (altitude in m, sensor and focal length in mm, image size in px).
 *
 * # Safety
 * `out_w` and `out_h` must be writable.
 */
enum RsfolStatus rsfol_compute_gsd(double flight_altitude_m,
                                   double sensor_width_mm,
                                   double sensor_height_mm,
                                   double focal_length_mm,
                                   double image_width_px,
                                   double image_height_px,
                                   double *out_w,
                                   double *out_h);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RSFOL_H */
