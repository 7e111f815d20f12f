#ifndef DYNPLACE_H
#define DYNPLACE_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DpFilterMode {
  DP_FILTER_MODE_HEURISTIC = 0,
  DP_FILTER_MODE_EXACT = 1,
} DpFilterMode;

typedef enum DpGeomMode {
  DP_GEOM_MODE_DISABLED = 0,
  /**
   * Correspondences restricted to shared direct-index nodes at `geom_level`.
   */
  DP_GEOM_MODE_LEVEL = 1,
  DP_GEOM_MODE_EXHAUSTIVE = 2,
} DpGeomMode;

/**
 * Result code of every fallible call.
 */
typedef enum DpStatus {
  DP_STATUS_OK = 0,
  DP_STATUS_NULL_ARGUMENT = 1,
  DP_STATUS_INVALID_ARGUMENT = 2,
  DP_STATUS_IO = 3,
  DP_STATUS_FORMAT = 4,
  /**
   * Vocabulary and database do not belong together.
   */
  DP_STATUS_MISMATCH = 5,
  /**
   * Duplicate frame id or empty representation.
   */
  DP_STATUS_REJECTED = 6,
  DP_STATUS_INTERNAL = 7,
} DpStatus;

/**
 * Opaque place database with its pipeline settings.
 */
typedef struct DpDatabase DpDatabase;

/**
 * Opaque vocabulary tree.
 */
typedef struct DpVocabulary DpVocabulary;

/**
 * Pipeline settings. Start from [`dp_config_default`].
 */
typedef struct DpConfig {
  uint32_t keypoints;
  double sensitivity;
  enum DpFilterMode filter_mode;
  /**
   * Keep every descriptor.
   */
  bool no_filter;
  double detector_confidence_min;
  /**
   * Valid when more than this many static features remain.
   */
  uint32_t place_threshold;
  bool gate_store;
  bool gate_query;
  enum DpGeomMode geom_mode;
  uint32_t geom_level;
  uint32_t ransac_iterations;
  double ransac_threshold;
  uint32_t min_inliers;
  uint64_t seed;
} DpConfig;

/**
 * Borrowed grayscale image.
 */
typedef struct DpImage {
  const uint8_t *data;
  uint32_t width;
  uint32_t height;
} DpImage;

/**
 * Detection box given by its centre and size in pixels.
 */
typedef struct DpBox {
  double cx;
  double cy;
  double width;
  double height;
  double confidence;
  /**
   * NUL-terminated class name, e.g. "car".
   */
  const char *class_name;
} DpBox;

typedef struct DpCandidate {
  uint32_t place_id;
  double score;
  bool geom_checked;
  bool geom_passed;
  uint32_t inliers;
} DpCandidate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *dp_version(void);

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call into the library from the same thread.
 */
const char *dp_last_error(void);

struct DpConfig dp_config_default(void);

/**
 * Hamming distance between two 32-byte descriptors; `u32::MAX` if either is null.
 */
uint32_t dp_hamming(const uint8_t *a, const uint8_t *b);

/**
 * Trains a vocabulary with branching `k` and depth `levels` from `count` images.
 */
enum DpStatus dp_vocab_train(const struct DpImage *images,
                             size_t count,
                             uint32_t k,
                             uint32_t levels,
                             const struct DpConfig *config,
                             struct DpVocabulary **out);

enum DpStatus dp_vocab_load(const char *path, struct DpVocabulary **out);

enum DpStatus dp_vocab_save(const struct DpVocabulary *vocab, const char *path);

/**
 * Number of leaf words; 0 for a null handle.
 */
uint32_t dp_vocab_word_count(const struct DpVocabulary *vocab);

void dp_vocab_free(struct DpVocabulary *vocab);

/**
 * Empty database over `vocab`. The database keeps its own reference to
 * the vocabulary, so `vocab` may be freed afterwards.
 */
enum DpStatus dp_db_new(const struct DpVocabulary *vocab,
                        const struct DpConfig *config,
                        struct DpDatabase **out);

enum DpStatus dp_db_load(const char *path,
                         const struct DpVocabulary *vocab,
                         const struct DpConfig *config,
                         struct DpDatabase **out);

/**
 * Writes the database; `out_bytes` (optional) receives the file size.
 */
enum DpStatus dp_db_save(const struct DpDatabase *db, const char *path, uint64_t *out_bytes);

/**
 * Extracts, filters and stores one frame. `out_place_id` receives the new
 * place id, or -1 when validity gating rejected the frame.
 */
enum DpStatus dp_db_add_frame(struct DpDatabase *db,
                              const char *frame_id,
                              const struct DpImage *image,
                              const struct DpBox *boxes,
                              size_t box_count,
                              int64_t *out_place_id);

/**
 * Queries with one frame. Up to `capacity` candidates are written to
 * `results` in rank order and their number to `out_count`. `out_skipped`
 * is set when gating skipped an invalid query (then `out_count` is 0).
 */
enum DpStatus dp_db_query_frame(const struct DpDatabase *db,
                                const struct DpImage *image,
                                const struct DpBox *boxes,
                                size_t box_count,
                                struct DpCandidate *results,
                                size_t capacity,
                                size_t *out_count,
                                bool *out_skipped);

/**
 * Stored entries; 0 for a null handle.
 */
uint32_t dp_db_len(const struct DpDatabase *db);

/**
 * Frames refused by validity gating; 0 for a null handle.
 */
uint64_t dp_db_rejected(const struct DpDatabase *db);

void dp_db_free(struct DpDatabase *db);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DYNPLACE_H */
