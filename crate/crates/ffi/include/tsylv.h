#ifndef TSYLV_H
#define TSYLV_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TsylvStatus {
  TSYLV_STATUS_OK = 0,
  TSYLV_STATUS_NULL_POINTER = 1,
  TSYLV_STATUS_INVALID_ARGUMENT = 2,
  TSYLV_STATUS_DIMENSION_MISMATCH = 3,
  TSYLV_STATUS_NON_FINITE = 4,
  TSYLV_STATUS_SINGULAR = 5,
  TSYLV_STATUS_RANK_DEFICIENT = 6,
  TSYLV_STATUS_NOT_RECIPROCAL_FREE = 7,
  TSYLV_STATUS_NO_CONVERGENCE = 8,
  TSYLV_STATUS_HYPOTHESIS_VIOLATED = 9,
  TSYLV_STATUS_IO = 10,
  TSYLV_STATUS_PARSE = 11,
  TSYLV_STATUS_PANIC = 12,
} TsylvStatus;

typedef enum TsylvMethod {
  /**
   * Stacked `m^2 x mn` least-squares oracle.
   */
  TSYLV_METHOD_DIRECT = 0,
  /**
   * Generalized Sylvester form for `m >= n`.
   */
  TSYLV_METHOD_OVER = 1,
  /**
   * Generalized Sylvester form for `m <= n`.
   */
  TSYLV_METHOD_UNDER = 2,
  /**
   * Square Lyapunov form `Y - S Y S^T = C - (S C)^T`.
   */
  TSYLV_METHOD_OOZAWA = 3,
  /**
   * Square Lyapunov form with the `X = Y - A^-1 Y^T B` lift.
   */
  TSYLV_METHOD_COR_UNDER = 4,
  /**
   * `Over`, `Under` or `Oozawa` by shape.
   */
  TSYLV_METHOD_AUTO = 5,
} TsylvMethod;

typedef struct TsylvInstance TsylvInstance;

typedef struct TsylvMatrix TsylvMatrix;

typedef struct TsylvReport TsylvReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len`). Returns the full message length
 * excluding the terminator, so a caller can size a second attempt.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t tsylv_last_error_message(char *buf, size_t len);

/**
 * Static NUL-terminated version string.
 */
const char *tsylv_version(void);

/**
 * Builds a `rows x cols` matrix from `rows * cols` row-major values.
 *
 * # Safety
 * `data` must point to `rows * cols` readable doubles; `out` must be writable.
 */
enum TsylvStatus tsylv_matrix_new(size_t rows,
                                  size_t cols,
                                  const double *data,
                                  struct TsylvMatrix **out);

/**
 * # Safety
 * `m` must be null or a handle from this library that was not yet freed.
 */
void tsylv_matrix_free(struct TsylvMatrix *m);

/**
 * Row count, or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t tsylv_matrix_rows(const struct TsylvMatrix *m);

/**
 * Column count, or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t tsylv_matrix_cols(const struct TsylvMatrix *m);

/**
 * Copies the row-major entries into `out`, which must hold exactly
 * `rows * cols` values (`len` is checked).
 *
 * # Safety
 * `m` must be a live handle and `out` must point to `len` writable doubles.
 */
enum TsylvStatus tsylv_matrix_copy_data(const struct TsylvMatrix *m, double *out, size_t len);

/**
 * Builds an instance from `A (m x n)`, `B (n x m)`, `C (m x m)`. The inputs
 * are copied and stay owned by the caller.
 *
 * # Safety
 * `a`, `b`, `c` must be live matrix handles; `out` must be writable.
 */
enum TsylvStatus tsylv_instance_new(const struct TsylvMatrix *a,
                                    const struct TsylvMatrix *b,
                                    const struct TsylvMatrix *c,
                                    struct TsylvInstance **out);

/**
 * Reads an instance file (`matrix <name> <rows> <cols>` blocks).
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum TsylvStatus tsylv_instance_read_file(const char *path, struct TsylvInstance **out);

/**
 * # Safety
 * `inst` must be a live handle; `path` a NUL-terminated string.
 */
enum TsylvStatus tsylv_instance_write_file(const struct TsylvInstance *inst, const char *path);

/**
 * Rows of `A`, or 0 for a null handle.
 *
 * # Safety
 * `inst` must be null or a live handle.
 */
size_t tsylv_instance_m(const struct TsylvInstance *inst);

/**
 * Columns of `A`, or 0 for a null handle.
 *
 * # Safety
 * `inst` must be null or a live handle.
 */
size_t tsylv_instance_n(const struct TsylvInstance *inst);

/**
 * # Safety
 * `inst` must be null or a handle that was not yet freed.
 */
void tsylv_instance_free(struct TsylvInstance *inst);

/**
 * Solves `inst` by `method`. `tol` is the relative residual tolerance used
 * for the `consistent` flag and `hyp_tol` the tolerance for the transform
 * hypotheses; pass a non-positive value for either to get the defaults
 * (`1e-8` and `1e-10`). A refused route (for example a spectrum that is not
 * reciprocal free) returns its status and leaves `*out` untouched.
 *
 * # Safety
 * `inst` must be a live handle; `out` must be writable.
 */
enum TsylvStatus tsylv_solve(const struct TsylvInstance *inst,
                             enum TsylvMethod method,
                             double tol,
                             double hyp_tol,
                             struct TsylvReport **out);

/**
 * New matrix handle holding the `n x m` solution; free it separately.
 *
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
enum TsylvStatus tsylv_report_x(const struct TsylvReport *report, struct TsylvMatrix **out);

/**
 * `||A X + X^T B - C||_F`, NaN for a null handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
double tsylv_report_residual(const struct TsylvReport *report);

/**
 * Reciprocal-free margin of `S`; NaN on the direct route or a null handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
double tsylv_report_margin(const struct TsylvReport *report);

/**
 * Numerical rank of the system that was solved.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
size_t tsylv_report_system_rank(const struct TsylvReport *report);

/**
 * Unknown count of the system that was solved; equal to the rank when the
 * solution is unique.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
size_t tsylv_report_unknowns(const struct TsylvReport *report);

/**
 * Whether the residual is within `tol * (1 + ||A|| + ||B|| + ||C||)`.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
bool tsylv_report_consistent(const struct TsylvReport *report);

/**
 * # Safety
 * `report` must be null or a handle that was not yet freed.
 */
void tsylv_report_free(struct TsylvReport *report);

/**
 * Reciprocal-free test for the eigenvalues of square `s`: writes
 * `min |lambda_i lambda_j - 1|` to `margin` and whether it exceeds the
 * tolerance to `free`. A non-positive `tol` selects
 * `1e-8 (1 + max|lambda|^2)`.
 *
 * # Safety
 * `s` must be a live handle; `margin` and `free` must be writable.
 */
enum TsylvStatus tsylv_reciprocal_check(const struct TsylvMatrix *s,
                                        double tol,
                                        double *margin,
                                        bool *free);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TSYLV_H */
