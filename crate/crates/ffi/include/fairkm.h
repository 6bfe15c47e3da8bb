#ifndef FAIRKM_H
#define FAIRKM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum FairkmStatus {
  FAIRKM_STATUS_OK = 0,
  // A required pointer argument was null.
  FAIRKM_STATUS_NULL_POINTER = 1,
  // An argument is out of range or inconsistent with another.
  FAIRKM_STATUS_INVALID_ARGUMENT = 2,
  // The input file could not be read.
  FAIRKM_STATUS_IO = 3,
  // The input file is not a well-formed numeric table.
  FAIRKM_STATUS_PARSE = 4,
  // The radius constraints need more than k anchors.
  FAIRKM_STATUS_INFEASIBLE = 5,
  // A caller-provided buffer is too small.
  FAIRKM_STATUS_BUFFER_TOO_SMALL = 6,
  // An internal panic was caught.
  FAIRKM_STATUS_PANIC = 7,
} FairkmStatus;

// A set of points in R^d.
typedef struct FairkmDataset FairkmDataset;

// Per-point fairness radii for a dataset and k.
typedef struct FairkmRadii FairkmRadii;

// Centers and quality metrics of one solve.
typedef struct FairkmResult FairkmResult;

// Solver settings. Obtain defaults from [`fairkm_options_default`].
typedef struct FairkmOptions {
  size_t k;
  // Anchor zone scale; must exceed 2.
  double gamma;
  // Local-search steps.
  size_t iterations;
  uint64_t seed;
  // Independent local-search runs; the cheapest is kept.
  size_t restarts;
  // Zone-preserving Lloyd rounds after local search (0 disables).
  size_t refine_iterations;
} FairkmOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or null if the last
// status-returning call succeeded. Valid until the next status-returning
// call on the same thread.
const char *fairkm_last_error_message(void);

// Library version as a static nul-terminated string.
const char *fairkm_version(void);

// Builds a dataset from `n * d` row-major coordinates (copied).
//
// # Safety
// `coords` must point to `n * d` readable doubles; `out` must be writable.
enum FairkmStatus fairkm_dataset_new(const double *coords,
                                     size_t n,
                                     size_t d,
                                     struct FairkmDataset **out);

// Reads a CSV file. `columns` selects zero-based columns (`ncolumns == 0`
// reads all); a nonzero `has_header` skips the first row.
//
// # Safety
// `path` must be a nul-terminated string; `columns` must hold `ncolumns`
// values when `ncolumns > 0`; `out` must be writable.
enum FairkmStatus fairkm_dataset_load_csv(const char *path,
                                          const size_t *columns,
                                          size_t ncolumns,
                                          int has_header,
                                          struct FairkmDataset **out);

// Standardizes every dimension to zero mean and unit variance in place.
//
// # Safety
// `ds` must be a live dataset handle.
enum FairkmStatus fairkm_dataset_normalize(struct FairkmDataset *ds);

// Number of points, or 0 for a null handle.
//
// # Safety
// `ds` must be null or a live dataset handle.
size_t fairkm_dataset_len(const struct FairkmDataset *ds);

// Dimension, or 0 for a null handle.
//
// # Safety
// `ds` must be null or a live dataset handle.
size_t fairkm_dataset_dim(const struct FairkmDataset *ds);

// Releases a dataset. Null is ignored.
//
// # Safety
// `ds` must be null or a handle not yet freed.
void fairkm_dataset_free(struct FairkmDataset *ds);

// Computes fairness radii for `k` clusters. `sample_size == 0` uses every
// point; otherwise radii are ranked against a shared sample drawn with `seed`.
//
// # Safety
// `ds` must be a live dataset handle; `out` must be writable.
enum FairkmStatus fairkm_radii_compute(const struct FairkmDataset *ds,
                                       size_t k,
                                       size_t sample_size,
                                       uint64_t seed,
                                       struct FairkmRadii **out);

// Wraps caller-supplied radii, one per point (copied).
//
// # Safety
// `values` must point to `n` readable doubles; `out` must be writable.
enum FairkmStatus fairkm_radii_from_values(const double *values,
                                           size_t n,
                                           struct FairkmRadii **out);

// Number of radii, or 0 for a null handle.
//
// # Safety
// `radii` must be null or a live radii handle.
size_t fairkm_radii_len(const struct FairkmRadii *radii);

// Copies the radii into `buf`, which must hold at least `fairkm_radii_len` values.
//
// # Safety
// `radii` must be a live handle; `buf` must have `capacity` writable doubles.
enum FairkmStatus fairkm_radii_copy(const struct FairkmRadii *radii, double *buf, size_t capacity);

// Releases radii. Null is ignored.
//
// # Safety
// `radii` must be null or a handle not yet freed.
void fairkm_radii_free(struct FairkmRadii *radii);

// Default settings for `k` clusters.
struct FairkmOptions fairkm_options_default(size_t k);

// Runs fair local search, then optional refinement, and reports the result.
//
// # Safety
// `ds` and `radii` must be live handles; `options` must be readable; `out`
// must be writable.
enum FairkmStatus fairkm_solve(const struct FairkmDataset *ds,
                               const struct FairkmRadii *radii,
                               const struct FairkmOptions *options,
                               struct FairkmResult **out);

// Number of centers, or 0 for a null handle.
//
// # Safety
// `result` must be null or a live result handle.
size_t fairkm_result_k(const struct FairkmResult *result);

// Dimension of the centers, or 0 for a null handle.
//
// # Safety
// `result` must be null or a live result handle.
size_t fairkm_result_dim(const struct FairkmResult *result);

// Copies the final center coordinates (k * d, row-major) into `buf`.
//
// # Safety
// `result` must be a live handle; `buf` must have `capacity` writable doubles.
enum FairkmStatus fairkm_result_centers(const struct FairkmResult *result,
                                        double *buf,
                                        size_t capacity);

// Copies the point indices chosen by local search (k values) into `buf`.
// These are the centers before refinement moves them off the data.
//
// # Safety
// `result` must be a live handle; `buf` must have `capacity` writable values.
enum FairkmStatus fairkm_result_center_ids(const struct FairkmResult *result,
                                           size_t *buf,
                                           size_t capacity);

// Sum of squared distances to the nearest final center; NaN for null.
//
// # Safety
// `result` must be null or a live result handle.
double fairkm_result_kmeans_cost(const struct FairkmResult *result);

// Sum of distances to the nearest final center; NaN for null.
//
// # Safety
// `result` must be null or a live result handle.
double fairkm_result_kmedian_cost(const struct FairkmResult *result);

// Largest ratio of a point's center distance to its radius; NaN for null.
//
// # Safety
// `result` must be null or a live result handle.
double fairkm_result_bound_ratio(const struct FairkmResult *result);

// Number of swaps local search accepted, or 0 for null.
//
// # Safety
// `result` must be null or a live result handle.
size_t fairkm_result_accepted_swaps(const struct FairkmResult *result);

// Releases a result. Null is ignored.
//
// # Safety
// `result` must be null or a handle not yet freed.
void fairkm_result_free(struct FairkmResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FAIRKM_H */
