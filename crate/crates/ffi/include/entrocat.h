#ifndef ENTROCAT_H
#define ENTROCAT_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Empty-cell handling for CSV loading, passed as a plain integer.
 */
typedef enum EcNaPolicy {
  EC_NA_POLICY_KEEP = 0,
  EC_NA_POLICY_DROP = 1,
} EcNaPolicy;

/**
 * Result codes. `EC_STATUS_OK` is zero; everything else is an error.
 */
typedef enum EcStatus {
  EC_STATUS_OK = 0,
  EC_STATUS_NULL_POINTER = 1,
  EC_STATUS_INVALID_UTF8 = 2,
  EC_STATUS_PARSE = 3,
  EC_STATUS_UNKNOWN_COLUMN = 4,
  EC_STATUS_NAME_COLLISION = 5,
  EC_STATUS_EMPTY_DATASET = 6,
  EC_STATUS_STRUCTURAL = 7,
  EC_STATUS_IO = 8,
  EC_STATUS_INVALID_ARGUMENT = 9,
  EC_STATUS_UNDEFINED_RATIO = 10,
  EC_STATUS_OUT_OF_RANGE = 11,
  EC_STATUS_PANIC = 12,
} EcStatus;

/**
 * Opaque dataset handle.
 */
typedef struct EcDataset EcDataset;

/**
 * Opaque distance-matrix handle.
 */
typedef struct EcMatrix EcMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *ec_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *ec_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void ec_string_free(char *s);

/**
 * Loads a CSV file.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string and `out` valid for writes.
 */
enum EcStatus ec_dataset_load_path(const char *path,
                                   uint8_t delimiter,
                                   uint32_t na,
                                   struct EcDataset **out);

/**
 * Parses CSV text.
 *
 * # Safety
 * `csv` must be a valid NUL-terminated string and `out` valid for writes.
 */
enum EcStatus ec_dataset_load_str(const char *csv,
                                  uint8_t delimiter,
                                  uint32_t na,
                                  struct EcDataset **out);

/**
 * # Safety
 * `d` must be null or a handle from `ec_dataset_load_*` not yet freed.
 */
void ec_dataset_free(struct EcDataset *d);

/**
 * # Safety
 * `d` must be a live handle and `out` valid for writes.
 */
enum EcStatus ec_dataset_row_count(const struct EcDataset *d, size_t *out);

/**
 * # Safety
 * `d` must be a live handle and `out` valid for writes.
 */
enum EcStatus ec_dataset_column_count(const struct EcDataset *d, size_t *out);

/**
 * Name of column `index`; free with [`ec_string_free`].
 *
 * # Safety
 * `d` must be a live handle and `out` valid for writes.
 */
enum EcStatus ec_dataset_column_name(const struct EcDataset *d, size_t index, char **out);

/**
 * Entropy of a column in bits.
 *
 * # Safety
 * `d` must be a live handle, `column` a valid string, `out` valid for writes.
 */
enum EcStatus ec_entropy(const struct EcDataset *d, const char *column, double *out);

/**
 * `MI(A|B)` in bits.
 *
 * # Safety
 * Pointers as for [`ec_symmetric_uncertainty`].
 */
enum EcStatus ec_mutual_information(const struct EcDataset *d,
                                    const char *a,
                                    const char *b,
                                    double *out);

/**
 * `SU(A, B)`.
 *
 * # Safety
 * `d` must be a live handle, `a` and `b` valid strings, `out` valid for writes.
 */
enum EcStatus ec_symmetric_uncertainty(const struct EcDataset *d,
                                       const char *a,
                                       const char *b,
                                       double *out);

/**
 * `1 - SU(A, B)`.
 *
 * # Safety
 * Pointers as for [`ec_symmetric_uncertainty`].
 */
enum EcStatus ec_distance(const struct EcDataset *d, const char *a, const char *b, double *out);

/**
 * Whether two columns induce the same partition of the rows.
 *
 * # Safety
 * Pointers as for [`ec_symmetric_uncertainty`].
 */
enum EcStatus ec_indiscernible(const struct EcDataset *d, const char *a, const char *b, bool *out);

/**
 * Distance matrix over all columns.
 *
 * # Safety
 * `d` must be a live handle and `out` valid for writes.
 */
enum EcStatus ec_distance_matrix(const struct EcDataset *d, struct EcMatrix **out);

/**
 * # Safety
 * `m` must be null or a handle from [`ec_distance_matrix`] not yet freed.
 */
void ec_matrix_free(struct EcMatrix *m);

/**
 * # Safety
 * `m` must be a live handle and `out` valid for writes.
 */
enum EcStatus ec_matrix_size(const struct EcMatrix *m, size_t *out);

/**
 * # Safety
 * `m` must be a live handle and `out` valid for writes.
 */
enum EcStatus ec_matrix_get(const struct EcMatrix *m, size_t row, size_t col, double *out);

/**
 * Matrix as `{"names": [...], "values": [[...]]}`; free with [`ec_string_free`].
 *
 * # Safety
 * `m` must be a live handle and `out` valid for writes.
 */
enum EcStatus ec_matrix_to_json(const struct EcMatrix *m, char **out);

/**
 * Similarity and distance axioms over the dataset's columns.
 * `report` may be null; otherwise it receives a text report to free with
 * [`ec_string_free`].
 *
 * # Safety
 * `d` must be a live handle, `passed` valid for writes, `report` null or valid for writes.
 */
enum EcStatus ec_check_metric(const struct EcDataset *d, bool *passed, char **report);

/**
 * Monoid laws and contractivity of the joint.
 *
 * # Safety
 * As for [`ec_check_metric`].
 */
enum EcStatus ec_check_monoid(const struct EcDataset *d, bool *passed, char **report);

/**
 * The relative-entropy lemma over column triples.
 *
 * # Safety
 * As for [`ec_check_metric`].
 */
enum EcStatus ec_check_lemma2(const struct EcDataset *d, bool *passed, char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENTROCAT_H */
