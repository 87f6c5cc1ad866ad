#ifndef HOROBOUNDARY_H
#define HOROBOUNDARY_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum HbStatus {
  HB_STATUS_OK = 0,
  HB_STATUS_INVALID_INPUT = 1,
  HB_STATUS_NO_CONVERGENCE = 2,
  HB_STATUS_NULL_POINTER = 3,
  HB_STATUS_PANIC = 4,
} HbStatus;

/**
 * Unit-area quadratic differential on the torus.
 */
typedef struct HbTorusQd HbTorusQd;

/**
 * Degree-two fiber polynomial.
 */
typedef struct HbXiAlpha HbXiAlpha;

typedef struct HbClassification {
  bool iso_visual;
  bool busemann_continuous;
  bool global_section;
  int64_t sigma_numerator;
  int64_t sigma_denominator;
  uint64_t dim_lower_bound;
} HbClassification;

/**
 * Point `x + i y` of the upper half-plane.
 */
typedef struct HbPoint {
  double x;
  double y;
} HbPoint;

typedef struct HbPillowSolution {
  double t;
  double a;
  double b;
  double l;
  double g;
  double ext;
  double invariant_residual;
  uint32_t iterations;
} HbPillowSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null.
 *
 * The pointer stays valid until the next `hb_*` call on the same thread.
 */
const char *hb_last_error_message(void);

/**
 * Classify the surface of genus `g` with `b_m` marked and `b_u` unmarked
 * boundary components and `p` punctures.
 *
 * # Safety
 * `out` must be null or point to writable memory for one `HbClassification`.
 */
enum HbStatus hb_classify(uint32_t g,
                          uint32_t b_m,
                          uint32_t b_u,
                          uint32_t p,
                          struct HbClassification *out);

/**
 * Teichmüller distance between two marked tori.
 *
 * # Safety
 * `out` must be null or point to a writable `double`.
 */
enum HbStatus hb_torus_distance(struct HbPoint a, struct HbPoint b, double *out);

/**
 * Quadratic differential at `base` with vertical class `(p, q)`.
 *
 * # Safety
 * `out` must be null or point to writable storage for one handle pointer.
 * The handle written there must be released with [`hb_torus_qd_free`].
 */
enum HbStatus hb_torus_qd_new(struct HbPoint base, double p, double q, struct HbTorusQd **out);

/**
 * # Safety
 * `qd` must be null or a handle from [`hb_torus_qd_new`] not yet freed.
 */
void hb_torus_qd_free(struct HbTorusQd *qd);

/**
 * Point at time `t` on the Teichmüller ray.
 *
 * # Safety
 * `qd` must be a live handle; `out` must be null or writable.
 */
enum HbStatus hb_torus_qd_ray(const struct HbTorusQd *qd, double t, struct HbPoint *out);

/**
 * Point at parameter `t` on the horocycle through the base point.
 *
 * # Safety
 * `qd` must be a live handle; `out` must be null or writable.
 */
enum HbStatus hb_torus_qd_horocycle(const struct HbTorusQd *qd, double t, struct HbPoint *out);

/**
 * Busemann horofunction of the ray evaluated at `x`.
 *
 * # Safety
 * `qd` must be a live handle; `out` must be null or writable.
 */
enum HbStatus hb_torus_qd_busemann_xi(const struct HbTorusQd *qd, struct HbPoint x, double *out);

/**
 * Fiber polynomial for `c` blocks and twist parameters `alpha` (length `3c`).
 *
 * # Safety
 * `alpha` must point to `alpha_len` readable doubles; `out` must be null or
 * writable. Release the handle with [`hb_xi_alpha_free`].
 */
enum HbStatus hb_xi_alpha_new(size_t c,
                              const double *alpha,
                              size_t alpha_len,
                              struct HbXiAlpha **out);

/**
 * # Safety
 * `h` must be null or a handle from [`hb_xi_alpha_new`] not yet freed.
 */
void hb_xi_alpha_free(struct HbXiAlpha *h);

/**
 * Number of variables, or 0 for a null handle.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
size_t hb_xi_alpha_dim(const struct HbXiAlpha *h);

/**
 * Value at the coordinate vector `x`.
 *
 * # Safety
 * `h` must be a live handle, `x` must point to `len` readable doubles and
 * `out` must be null or writable.
 */
enum HbStatus hb_xi_alpha_eval(const struct HbXiAlpha *h, const double *x, size_t len, double *out);

/**
 * Sum of all coefficients, the value of the square at the all-ones vector.
 *
 * # Safety
 * `h` must be a live handle; `out` must be null or writable.
 */
enum HbStatus hb_xi_alpha_coefficient_sum(const struct HbXiAlpha *h, double *out);

/**
 * Solve the pillowcase family at `t` in `(0, 1)`.
 *
 * # Safety
 * `out` must be null or point to a writable `HbPillowSolution`.
 */
enum HbStatus hb_pillow_solve(double t, struct HbPillowSolution *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOROBOUNDARY_H */
