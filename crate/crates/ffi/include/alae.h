#ifndef ALAE_H
#define ALAE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AlaeAlphabet {
  ALAE_ALPHABET_DNA = 0,
  ALAE_ALPHABET_PROTEIN = 1,
} AlaeAlphabet;

typedef enum AlaeMode {
  ALAE_MODE_ALAE = 0,
  ALAE_MODE_BWTSW = 1,
  ALAE_MODE_ORACLE = 2,
} AlaeMode;

/**
 * Result codes.
 */
typedef enum AlaeStatus {
  ALAE_STATUS_OK = 0,
  ALAE_STATUS_NULL_POINTER = 1,
  ALAE_STATUS_INVALID_ARGUMENT = 2,
  ALAE_STATUS_IO = 3,
  ALAE_STATUS_SEQUENCE = 4,
  ALAE_STATUS_INDEX = 5,
  ALAE_STATUS_SCORING = 6,
  ALAE_STATUS_FILTER = 7,
  ALAE_STATUS_ANALYSIS = 8,
  ALAE_STATUS_SEARCH = 9,
  ALAE_STATUS_PANIC = 10,
} AlaeStatus;

/**
 * Opaque hit list handle.
 */
typedef struct AlaeHits AlaeHits;

/**
 * Opaque index handle.
 */
typedef struct AlaeIndex AlaeIndex;

/**
 * Match reward, mismatch penalty, gap open and gap extension.
 */
typedef struct AlaeScheme {
  int32_t matched;
  int32_t mismatch;
  int32_t gap_open;
  int32_t gap_extend;
} AlaeScheme;

/**
 * One reported end pair. Text positions are 1-based and local to `record`.
 */
typedef struct AlaeHit {
  size_t record;
  size_t start_t;
  size_t end_t;
  size_t end_p;
  int32_t score;
} AlaeHit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *alae_last_error_message(void);

/**
 * Builds an index from FASTA bytes.
 *
 * # Safety
 * `fasta` must point to `len` readable bytes and `out` must be writable.
 */
enum AlaeStatus alae_index_build_fasta(const uint8_t *fasta,
                                       size_t len,
                                       enum AlaeAlphabet alphabet,
                                       bool lenient,
                                       struct AlaeIndex **out);

/**
 * Loads a serialized index file.
 *
 * # Safety
 * `file` must be a NUL-terminated string and `out` must be writable.
 */
enum AlaeStatus alae_index_load(const char *file, struct AlaeIndex **out);

/**
 * Writes an index to a file.
 *
 * # Safety
 * `index` must come from this library and `file` must be a NUL-terminated string.
 */
enum AlaeStatus alae_index_save(const struct AlaeIndex *index, const char *file);

/**
 * Text length `n`, or 0 for a null handle.
 *
 * # Safety
 * `index` must be null or come from this library.
 */
size_t alae_index_len(const struct AlaeIndex *index);

/**
 * Number of records, or 0 for a null handle.
 *
 * # Safety
 * `index` must be null or come from this library.
 */
size_t alae_index_record_count(const struct AlaeIndex *index);

/**
 * # Safety
 * `index` must be null or come from this library, and not be used again.
 */
void alae_index_free(struct AlaeIndex *index);

/**
 * Searches one query given as residue letters (for example `"GCTAG"`).
 *
 * # Safety
 * `index` must come from this library, `query` must point to `len`
 * readable bytes and `out` must be writable.
 */
enum AlaeStatus alae_search(const struct AlaeIndex *index,
                            const uint8_t *query,
                            size_t len,
                            struct AlaeScheme scoring,
                            int32_t threshold,
                            enum AlaeMode mode,
                            size_t threads,
                            struct AlaeHits **out);

/**
 * Number of hits, or 0 for a null handle.
 *
 * # Safety
 * `hits` must be null or come from this library.
 */
size_t alae_hits_len(const struct AlaeHits *hits);

/**
 * Copies hit `i` (in end-position order) into `out`.
 *
 * # Safety
 * `hits` must come from this library and `out` must be writable.
 */
enum AlaeStatus alae_hits_get(const struct AlaeHits *hits, size_t i, struct AlaeHit *out);

/**
 * # Safety
 * `hits` must be null or come from this library, and not be used again.
 */
void alae_hits_free(struct AlaeHits *hits);

/**
 * Expected calculated entries bound `coefficient * m * n^exponent`.
 *
 * # Safety
 * `coefficient` and `exponent` must be writable.
 */
enum AlaeStatus alae_entry_bound(struct AlaeScheme scoring,
                                 size_t sigma,
                                 double *coefficient,
                                 double *exponent);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ALAE_H */
