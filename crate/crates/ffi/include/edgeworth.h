#ifndef EDGEWORTH_H
#define EDGEWORTH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EwStatus {
  EW_STATUS_OK = 0,
  EW_STATUS_INVALID_ARGUMENT = 1,
  EW_STATUS_UNSUPPORTED_ORDER = 2,
  EW_STATUS_STANDARDIZATION = 3,
  EW_STATUS_DIMENSION = 4,
  EW_STATUS_SINGULARITY = 5,
  EW_STATUS_IO = 6,
  EW_STATUS_PARSE = 7,
  EW_STATUS_NULL_POINTER = 8,
  EW_STATUS_PANIC = 9,
} EwStatus;

// Opaque point cloud in `R^d`.
typedef struct EwDataset EwDataset;

// Opaque Edgeworth expansion.
typedef struct EwExpansion EwExpansion;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failing call on this thread; empty if none. The
// pointer stays valid until the next failing call on the same thread.
const char *ew_last_error(void);

// Library version as a static NUL-terminated string.
const char *ew_version(void);

// Copies `n` points of dimension `d` (row-major) into a new dataset.
//
// # Safety
// `points` must hold `n*d` doubles; `out_handle` must be writable.
enum EwStatus ew_dataset_new(const double *points,
                             size_t n,
                             size_t d,
                             struct EwDataset **out_handle);

// # Safety
// `h` must be null or a handle from [`ew_dataset_new`] not yet freed.
void ew_dataset_free(struct EwDataset *h);

// Builds an expansion from a standardized cumulant table: `count` entries,
// entry `k` has multi-index `indices[k*d .. k*d+d]` and value `values[k]`.
// The table must list every index of order 1..=`max_order` exactly once.
//
// # Safety
// Pointers must be valid for the stated lengths; `out_handle` writable.
enum EwStatus ew_expansion_from_cumulants(size_t d,
                                          uint32_t max_order,
                                          const uint32_t *indices,
                                          const double *values,
                                          size_t count,
                                          uint64_t n,
                                          uint32_t s,
                                          struct EwExpansion **out_handle);

// Expansion of order `s` at sample size `n` for a built-in family.
//
// # Safety
// `family` must be a NUL-terminated string; `out_handle` writable.
enum EwStatus ew_expansion_from_family(const char *family,
                                       uint64_t n,
                                       uint32_t s,
                                       struct EwExpansion **out_handle);

// Expansion built from the standardized empirical cumulants of a dataset.
//
// # Safety
// `data` must be a live dataset handle; `out_handle` writable.
enum EwStatus ew_expansion_from_dataset(const struct EwDataset *data,
                                        uint32_t s,
                                        struct EwExpansion **out_handle);

// # Safety
// `h` must be null or a live expansion handle.
void ew_expansion_free(struct EwExpansion *h);

// # Safety
// `e` live; `x` holds `d` doubles; `value` writable.
enum EwStatus ew_expansion_density(const struct EwExpansion *e,
                                   const double *x,
                                   size_t d,
                                   double *value);

// `Q̃((−∞, t])` for a one-dimensional expansion.
//
// # Safety
// `e` live; `value` writable.
enum EwStatus ew_expansion_cdf_1d(const struct EwExpansion *e, double t, double *value);

// Signed measure of the box `Π [lower_k, upper_k]`; infinite bounds allowed.
//
// # Safety
// `e` live; `lower` and `upper` hold `d` doubles; outputs writable.
enum EwStatus ew_expansion_box_measure(const struct EwExpansion *e,
                                       const double *lower,
                                       const double *upper,
                                       size_t d,
                                       double *value,
                                       double *error);

// Empirical characteristic function `(1/n) Σ exp(i t·X_j)`.
//
// # Safety
// `data` live; `t` holds `d` doubles; outputs writable.
enum EwStatus ew_empirical_cf(const struct EwDataset *data,
                              const double *t,
                              size_t d,
                              double *re,
                              double *im);

// Weak Cramér scan of the empirical measure over `R < ‖t‖ ≤ t_max` on the
// default grid. Pass `c <= 0` to only report `ĉ`. On return `violated` is
// 1 when the margin fails and `argmin` (length `d`) holds the minimizer.
//
// # Safety
// `data` live; `argmin` holds `d` doubles; outputs writable.
enum EwStatus ew_weak_cramer_scan(const struct EwDataset *data,
                                  double b,
                                  double r_inner,
                                  double t_max,
                                  double c,
                                  double *c_hat,
                                  int32_t *violated,
                                  double *argmin);

// The pairwise statistic `S(t)` and `1 − |φ_emp(t)|` at one frequency.
//
// # Safety
// `data` live; `t` holds `d` doubles; outputs writable.
enum EwStatus ew_ustat_certificate(const struct EwDataset *data,
                                   const double *t,
                                   size_t d,
                                   double b,
                                   double *s_value,
                                   double *one_minus_abs_cf);

// `exp(−c_R² n / 2)`.
//
// # Safety
// `value` writable.
enum EwStatus ew_failure_prob_bound(double c_r, uint64_t n, double *value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EDGEWORTH_H */
