#ifndef UZAWA_CONTACT_H
#define UZAWA_CONTACT_H

/* Generated by cbindgen from uzawa-contact-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible entry point.
 */
typedef enum UcStatus {
  /**
   * Success; for solves, the method converged.
   */
  UC_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  UC_STATUS_NULL_POINTER = 1,
  /**
   * An argument was out of range (mesh sizes, method id, tolerances).
   */
  UC_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Instance JSON failed to parse or validate.
   */
  UC_STATUS_PARSE_ERROR = 3,
  /**
   * The stiffness matrix is not positive definite.
   */
  UC_STATUS_NOT_POSITIVE_DEFINITE = 4,
  /**
   * The solver hit the iteration cap before converging.
   */
  UC_STATUS_MAX_ITER_REACHED = 5,
  /**
   * Any other internal failure.
   */
  UC_STATUS_INTERNAL_ERROR = 6,
} UcStatus;

/**
 * Dual method selector for `uc_solve`.
 */
typedef enum UcMethod {
  UC_METHOD_UZAWA = 0,
  UC_METHOD_ACCELERATED = 1,
  UC_METHOD_ACCELERATED_RESTART = 2,
} UcMethod;

/**
 * Opaque contact-QP instance.
 */
typedef struct UcQp UcQp;

/**
 * Opaque solve result.
 */
typedef struct UcResult UcResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds the cantilever benchmark with the published mesh ratio
 * `ny = nx / 3` (`nx` must be a positive multiple of 3) and writes the
 * new handle to `out`.
 *
 * # Safety
 * `out` must be null or a valid pointer to a handle slot.
 */
enum UcStatus uc_qp_paper_benchmark(uintptr_t nx, struct UcQp **out);

/**
 * Builds the cantilever benchmark on an `nx` by `ny` mesh.
 *
 * # Safety
 * `out` must be null or a valid pointer to a handle slot.
 */
enum UcStatus uc_qp_benchmark(uintptr_t nx, uintptr_t ny, struct UcQp **out);

/**
 * Parses an instance from a NUL-terminated JSON document (the same
 * format the CLI exports) and writes the new handle to `out`.
 *
 * # Safety
 * `json` must be null or a valid NUL-terminated string; `out` must be
 * null or a valid pointer to a handle slot.
 */
enum UcStatus uc_qp_from_json(const char *json, struct UcQp **out);

/**
 * Number of free displacement degrees of freedom, or 0 on null.
 *
 * # Safety
 * `qp` must be null or a live handle from a `uc_qp_*` constructor.
 */
uintptr_t uc_qp_dim(const struct UcQp *qp);

/**
 * Number of contact constraints, or 0 on null.
 *
 * # Safety
 * `qp` must be null or a live handle from a `uc_qp_*` constructor.
 */
uintptr_t uc_qp_ncon(const struct UcQp *qp);

/**
 * Releases an instance handle. Null is a no-op.
 *
 * # Safety
 * `qp` must be null or a live handle from a `uc_qp_*` constructor;
 * the handle must not be used afterwards.
 */
void uc_qp_free(struct UcQp *qp);

/**
 * Runs one solver. `alpha <= 0` selects the automatic step size
 * `lambda_1(K) / sigma_max(N)^2`. On success (or on hitting the
 * iteration cap) a result handle is written to `out`; `MaxIterReached`
 * is reported through the status while the partial result stays
 * available.
 *
 * # Safety
 * `qp` must be null or a live instance handle; `out` must be null or a
 * valid pointer to a handle slot.
 */
enum UcStatus uc_solve(const struct UcQp *qp,
                       int method,
                       double alpha,
                       double epsilon,
                       uintptr_t max_iter,
                       struct UcResult **out);

/**
 * Number of dual updates performed, or 0 on null.
 *
 * # Safety
 * `result` must be null or a live handle from `uc_solve`.
 */
uintptr_t uc_result_iterations(const struct UcResult *result);

/**
 * Step size the solve actually used, or NaN on null.
 *
 * # Safety
 * `result` must be null or a live handle from `uc_solve`.
 */
double uc_result_alpha(const struct UcResult *result);

/**
 * 1 when the solve converged, 0 otherwise (including null).
 *
 * # Safety
 * `result` must be null or a live handle from `uc_solve`.
 */
int uc_result_converged(const struct UcResult *result);

/**
 * Copies the displacement vector into `buf` (capacity `len >= dim`).
 *
 * # Safety
 * `result` must be null or a live handle from `uc_solve`; `buf` must
 * be null or point to at least `len` writable doubles.
 */
enum UcStatus uc_result_displacements(const struct UcResult *result, double *buf, uintptr_t len);

/**
 * Copies the reaction vector into `buf` (capacity `len >= ncon`).
 *
 * # Safety
 * `result` must be null or a live handle from `uc_solve`; `buf` must
 * be null or point to at least `len` writable doubles.
 */
enum UcStatus uc_result_reactions(const struct UcResult *result, double *buf, uintptr_t len);

/**
 * Total KKT residual of the result on its instance, or NaN on error.
 *
 * # Safety
 * `qp` and `result` must each be null or live handles.
 */
double uc_result_kkt_total(const struct UcQp *qp, const struct UcResult *result);

/**
 * Releases a result handle. Null is a no-op.
 *
 * # Safety
 * `result` must be null or a live handle from `uc_solve`; the handle
 * must not be used afterwards.
 */
void uc_result_free(struct UcResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UZAWA_CONTACT_H */
