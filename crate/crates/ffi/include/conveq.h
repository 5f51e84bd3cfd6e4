#ifndef CONVEQ_H
#define CONVEQ_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum ConveqStatus {
  CONVEQ_STATUS_OK = 0,
  CONVEQ_STATUS_NULL_POINTER = 1,
  CONVEQ_STATUS_INVALID_INPUT = 2,
  CONVEQ_STATUS_DIMENSION_MISMATCH = 3,
  CONVEQ_STATUS_NOT_CONVERGED = 4,
  CONVEQ_STATUS_NOT_IN_BODY = 5,
  CONVEQ_STATUS_INSIDE_BODY = 6,
  CONVEQ_STATUS_UNSOUND_REDUCTION = 7,
  CONVEQ_STATUS_BUFFER_TOO_SMALL = 8,
  CONVEQ_STATUS_PANIC = 9,
} ConveqStatus;

/**
 * Opaque convex body with its tolerances.
 */
typedef struct ConveqBody ConveqBody;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, or null. The pointer
 * stays valid until the next call into the library from this thread.
 */
const char *conveq_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *conveq_version(void);

/**
 * Creates `conv` of `count` generators stored row-major in `coords`.
 *
 * # Safety
 * `coords` must point to `count * dim` doubles; `out` must be writable.
 */
enum ConveqStatus conveq_body_polytope(const double *coords,
                                       size_t count,
                                       size_t dim,
                                       struct ConveqBody **out);

/**
 * Creates the closed ball of `radius` around `center`.
 *
 * # Safety
 * `center` must point to `dim` doubles; `out` must be writable.
 */
enum ConveqStatus conveq_body_ball(const double *center,
                                   size_t dim,
                                   double radius,
                                   struct ConveqBody **out);

/**
 * Releases a body. Null is ignored.
 *
 * # Safety
 * `body` must come from a `conveq_body_*` constructor and not be used again.
 */
void conveq_body_free(struct ConveqBody *body);

/**
 * Ambient dimension of the body, or 0 for a null handle.
 *
 * # Safety
 * `body` must be null or a live handle.
 */
size_t conveq_body_dim(const struct ConveqBody *body);

/**
 * Overrides the feasibility, point and equilibrium tolerances
 * (defaults 1e-8, 1e-12, 1e-9) used by calls on this body.
 *
 * # Safety
 * `body` must be a live handle.
 */
enum ConveqStatus conveq_body_set_tolerances(struct ConveqBody *body,
                                             double feas,
                                             double pt,
                                             double eq);

/**
 * Metric projection of `x` onto the body, with the variational
 * certificate `max_{v ∈ S} ⟨v − p, x − p⟩` in `out_residual` (may be null).
 *
 * # Safety
 * `x` and `out_point` must hold `dim` doubles.
 */
enum ConveqStatus conveq_project(const struct ConveqBody *body,
                                 const double *x,
                                 size_t dim,
                                 double *out_point,
                                 double *out_residual);

/**
 * Membership test `dist(x, S) ≤ tol`.
 *
 * # Safety
 * `x` must hold `dim` doubles; `out` must be writable.
 */
enum ConveqStatus conveq_contains(const struct ConveqBody *body,
                                  const double *x,
                                  size_t dim,
                                  double tol,
                                  bool *out);

/**
 * Extreme points of a polytope body, in generator order.
 *
 * # Safety
 * `out_points` must hold `capacity * dim` doubles (may be null when
 * `capacity` is 0); `out_count` must be writable.
 */
enum ConveqStatus conveq_extreme_points(const struct ConveqBody *body,
                                        double *out_points,
                                        size_t capacity,
                                        size_t *out_count);

/**
 * Points of the body farthest from `x`.
 *
 * # Safety
 * As [`conveq_extreme_points`]; `x` must hold `dim` doubles.
 */
enum ConveqStatus conveq_farthest_points(const struct ConveqBody *body,
                                         const double *x,
                                         size_t dim,
                                         double *out_points,
                                         size_t capacity,
                                         size_t *out_count);

/**
 * Whether `d` lies in the normal cone at `x0`, i.e.
 * `⟨x − x0, d⟩ ≤ tol` for every `x` in the body.
 *
 * # Safety
 * `x0` and `d` must hold `dim` doubles; `out` must be writable.
 */
enum ConveqStatus conveq_normal_cone_contains(const struct ConveqBody *body,
                                              const double *x0,
                                              const double *d,
                                              size_t dim,
                                              double tol,
                                              bool *out);

/**
 * Boundary point whose translated normal cone contains the exterior point
 * `x`. Fails with `CONVEQ_STATUS_INSIDE_BODY` for points of the body.
 *
 * # Safety
 * `x` and `out_point` must hold `dim` doubles.
 */
enum ConveqStatus conveq_locate_partition_cell(const struct ConveqBody *body,
                                               const double *x,
                                               size_t dim,
                                               double *out_point);

/**
 * Runs an instance file (JSON text) and returns the report as JSON. Free
 * the report with [`conveq_string_free`].
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out_report` must be writable.
 */
enum ConveqStatus conveq_solve_json(const char *json, char **out_report);

/**
 * Compares the reduced solver with the brute-force oracle for an
 * equilibrium-type instance and returns the comparison as JSON. The call
 * succeeds whether or not the two agree; inspect `"pass"` in the report.
 *
 * # Safety
 * As [`conveq_solve_json`].
 */
enum ConveqStatus conveq_verify_json(const char *json, char **out_report);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used again.
 */
void conveq_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONVEQ_H */
