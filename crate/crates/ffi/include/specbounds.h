#ifndef SPECBOUNDS_H
#define SPECBOUNDS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible function.
typedef enum SbStatus {
  SB_STATUS_OK = 0,
  SB_STATUS_NULL_POINTER = 1,
  SB_STATUS_INVALID_ARGUMENT = 2,
  SB_STATUS_NOT_HERMITIAN = 3,
  SB_STATUS_CONVERGENCE_FAILURE = 4,
  SB_STATUS_DEGENERATE = 5,
  SB_STATUS_LIMIT_EXCEEDED = 6,
  SB_STATUS_NOT_PSD = 7,
  SB_STATUS_PANIC = 99,
} SbStatus;

// Opaque Hermitian matrix.
typedef struct SbMatrix SbMatrix;

// Opaque secular problem.
typedef struct SbSecular SbSecular;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *sb_last_error(void);

// Builds a matrix from `n*n` row-major real parts and optional imaginary
// parts (`im` may be null).
//
// # Safety
// `re` (and `im` when non-null) must point to `n*n` doubles; `out` must be
// writable.
enum SbStatus sb_matrix_new(size_t n, const double *re, const double *im, struct SbMatrix **out);

// # Safety
// `m` must be null or a handle from [`sb_matrix_new`] not yet freed.
void sb_matrix_free(struct SbMatrix *m);

// Dimension of `m`, or 0 for null.
//
// # Safety
// `m` must be null or a live handle.
size_t sb_matrix_dim(const struct SbMatrix *m);

// Writes the `n` eigenvalues in non-increasing order.
//
// # Safety
// `m` must be a live handle and `out` must hold `n` doubles.
enum SbStatus sb_matrix_eigenvalues(const struct SbMatrix *m, double *out);

// Writes the `n − 1` eigenvalues of the matrix with row and column `k`
// (1-based) deleted.
//
// # Safety
// `m` must be a live handle and `out` must hold `n − 1` doubles.
enum SbStatus sb_matrix_submatrix_eigenvalues(const struct SbMatrix *m, size_t k, double *out);

// Interval for `Σ_k μ_{k,j}` from the spectrum of `m`.
//
// # Safety
// `m` must be a live handle; `lower` and `upper` must be writable.
enum SbStatus sb_thompson_bounds(const struct SbMatrix *m, size_t j, double *lower, double *upper);

// Interval for `Σ_k Σ_{j=ℓ}^r μ_{k,j}`.
//
// # Safety
// As for [`sb_thompson_bounds`].
enum SbStatus sb_aggregate_bounds(const struct SbMatrix *m,
                                  size_t ell,
                                  size_t r,
                                  double *lower,
                                  double *upper);

// Second interval for `Σ_k Σ_{j=ℓ}^r μ_{k,j}`, anchored at `λ_1` and `λ_n`.
//
// # Safety
// As for [`sb_thompson_bounds`].
enum SbStatus sb_corollary_bounds(const struct SbMatrix *m,
                                  size_t ell,
                                  size_t r,
                                  double *lower,
                                  double *upper);

// Sets `*pass` to 1 when the replicated `X_size` majorizes the replicated
// `X_k`, else 0.
//
// # Safety
// `m` must be a live handle and `pass` writable.
enum SbStatus sb_hierarchy_check(const struct SbMatrix *m, size_t k, size_t size, int32_t *pass);

// Sets `*pass` to 1 when the minor-product chain holds. Fails with
// `NotPsd` for indefinite matrices.
//
// # Safety
// `m` must be a live handle and `pass` writable.
enum SbStatus sb_szasz_check(const struct SbMatrix *m, int32_t *pass);

// Builds a secular problem from `n` poles and optional weights (null means
// equal weights). Weights are normalized to sum to one.
//
// # Safety
// `poles` (and `weights` when non-null) must point to `n` doubles; `out`
// must be writable.
enum SbStatus sb_secular_new(size_t n,
                             const double *poles,
                             const double *weights,
                             struct SbSecular **out);

// # Safety
// `p` must be null or a handle from [`sb_secular_new`] not yet freed.
void sb_secular_free(struct SbSecular *p);

// Writes the `n − 1` roots in non-increasing order.
//
// # Safety
// `p` must be a live handle and `out` must hold `n − 1` doubles.
enum SbStatus sb_secular_solve(const struct SbSecular *p, double *out);

// Interval for `μ_ℓ + … + μ_r`.
//
// # Safety
// `p` must be a live handle; `lower` and `upper` must be writable.
enum SbStatus sb_weighted_bounds(const struct SbSecular *p,
                                 size_t ell,
                                 size_t r,
                                 double *lower,
                                 double *upper);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPECBOUNDS_H */
