#ifndef ARCWAVE_H
#define ARCWAVE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum ArcwaveStatus {
  ARCWAVE_STATUS_OK = 0,
  ARCWAVE_STATUS_NULL_POINTER = 1,
  ARCWAVE_STATUS_INVALID_ARGUMENT = 2,
  ARCWAVE_STATUS_INVALID_MATERIAL = 3,
  ARCWAVE_STATUS_INVALID_GEOMETRY = 4,
  /**
   * GMRES hit the iteration cap; the solution handle is still produced.
   */
  ARCWAVE_STATUS_NOT_CONVERGED = 5,
  /**
   * Breakdown, eigen-solver failure, or evaluation too close to the curve.
   */
  ARCWAVE_STATUS_NUMERICAL = 6,
  /**
   * A Rust panic was caught at the boundary.
   */
  ARCWAVE_STATUS_INTERNAL = 7,
} ArcwaveStatus;

/**
 * Built-in curves.
 */
typedef enum ArcwaveCurve {
  /**
   * Closed circle; `param` is the radius.
   */
  ARCWAVE_CURVE_CIRCLE = 0,
  /**
   * Closed ellipse `(cos s, a sin s)`; `param` is `a`.
   */
  ARCWAVE_CURVE_ELLIPSE = 1,
  /**
   * Open segment `[-1, 1] x {0}`; `param` is ignored.
   */
  ARCWAVE_CURVE_FLAT_STRIP = 2,
  /**
   * Open arc `exp(t)(cos 5t, sin 5t)`; `param` is ignored.
   */
  ARCWAVE_CURVE_SPIRAL = 3,
} ArcwaveCurve;

typedef enum ArcwaveFormulation {
  ARCWAVE_FORMULATION_DIR_SW = 0,
  ARCWAVE_FORMULATION_DIR_NW_SW = 1,
  ARCWAVE_FORMULATION_DIR_NTW_SW = 2,
  ARCWAVE_FORMULATION_NEU_NW = 3,
  ARCWAVE_FORMULATION_NEU_NW_SW = 4,
} ArcwaveFormulation;

/**
 * Opaque elastic medium.
 */
typedef struct ArcwaveMaterial ArcwaveMaterial;

/**
 * Opaque discretized obstacle with its cached operators.
 */
typedef struct ArcwaveProblem ArcwaveProblem;

/**
 * Opaque solved density plus solver statistics.
 */
typedef struct ArcwaveSolution ArcwaveSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread (empty if none).
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *arcwave_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *arcwave_version(void);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum ArcwaveStatus arcwave_material_new(double lambda,
                                        double mu,
                                        double rho,
                                        double omega,
                                        struct ArcwaveMaterial **out);

/**
 * Shear and pressure wavenumbers.
 *
 * # Safety
 * `m` must come from [`arcwave_material_new`]; `ks`, `kp` must be writable.
 */
enum ArcwaveStatus arcwave_material_wavenumbers(const struct ArcwaveMaterial *m,
                                                double *ks,
                                                double *kp);

/**
 * # Safety
 * `m` must come from [`arcwave_material_new`] (or be null) and not be used
 * afterwards.
 */
void arcwave_material_free(struct ArcwaveMaterial *m);

/**
 * Discretizes a curve with `n` Chebyshev nodes (open arcs) or `2 n`
 * periodic nodes (closed curves). The material is copied.
 *
 * # Safety
 * `m` must be a live material handle; `out` must be writable.
 */
enum ArcwaveStatus arcwave_problem_new(const struct ArcwaveMaterial *m,
                                       enum ArcwaveCurve curve,
                                       double param,
                                       size_t n,
                                       struct ArcwaveProblem **out);

/**
 * Number of discretization nodes (the unknown count is twice this).
 *
 * # Safety
 * `p` must be a live problem handle.
 */
size_t arcwave_problem_node_count(const struct ArcwaveProblem *p);

/**
 * Node coordinates as `2 * node_count` doubles `(x1, x2)` per node.
 *
 * # Safety
 * `xy` must have room for `2 * node_count` doubles.
 */
enum ArcwaveStatus arcwave_problem_nodes(const struct ArcwaveProblem *p, double *xy, size_t len);

/**
 * # Safety
 * `p` must come from [`arcwave_problem_new`] (or be null).
 */
void arcwave_problem_free(struct ArcwaveProblem *p);

/**
 * Scattering of a plane P-wave travelling in direction `angle`.
 * Operators are assembled on first use and cached in the problem.
 *
 * # Safety
 * `p` must be a live problem handle; `out` must be writable.
 */
enum ArcwaveStatus arcwave_solve_plane_wave(struct ArcwaveProblem *p,
                                            enum ArcwaveFormulation formulation,
                                            double angle,
                                            double tol,
                                            size_t maxit,
                                            struct ArcwaveSolution **out);

/**
 * Boundary data of a known point source at `(z1, z2)` (which must lie
 * inside the obstacle for the result to be a scattering solution).
 *
 * # Safety
 * As for [`arcwave_solve_plane_wave`].
 */
enum ArcwaveStatus arcwave_solve_point_source(struct ArcwaveProblem *p,
                                              enum ArcwaveFormulation formulation,
                                              double z1,
                                              double z2,
                                              double tol,
                                              size_t maxit,
                                              struct ArcwaveSolution **out);

/**
 * GMRES statistics. Any output pointer may be null.
 *
 * # Safety
 * `s` must be a live solution handle.
 */
enum ArcwaveStatus arcwave_solution_stats(const struct ArcwaveSolution *s,
                                          size_t *iterations,
                                          bool *converged,
                                          double *final_residual);

/**
 * Solver density per node, `4 * node_count` doubles.
 *
 * # Safety
 * `out` must have room for `len` doubles.
 */
enum ArcwaveStatus arcwave_solution_density(const struct ArcwaveSolution *s,
                                            double *out,
                                            size_t len);

/**
 * Scattered field at `count` points given as `(x1, x2)` pairs; writes
 * `4 * count` doubles. Points too close to the curve are rejected.
 *
 * # Safety
 * `xy` must hold `2 * count` doubles and `out` room for `4 * count`.
 */
enum ArcwaveStatus arcwave_solution_field(const struct ArcwaveSolution *s,
                                          const double *xy,
                                          size_t count,
                                          double *out);

/**
 * Far-field amplitudes `u_p`, `u_s` of a single-layer (Dirichlet) solution
 * at `count` equispaced directions; each output gets `2 * count` doubles.
 *
 * # Safety
 * `up` and `us` must each have room for `2 * count` doubles.
 */
enum ArcwaveStatus arcwave_solution_far_field(const struct ArcwaveSolution *s,
                                              size_t count,
                                              double *up,
                                              double *us);

/**
 * # Safety
 * `s` must come from a solve call (or be null).
 */
void arcwave_solution_free(struct ArcwaveSolution *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ARCWAVE_H */
