#ifndef POLYDSA_H
#define POLYDSA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PdStatus {
  PD_STATUS_OK = 0,
  PD_STATUS_INVALID_ARGUMENT = 1,
  PD_STATUS_NULL_POINTER = 2,
  PD_STATUS_SINGULAR = 3,
  PD_STATUS_NO_CONVERGENCE = 4,
  PD_STATUS_INSUFFICIENT_DATA = 5,
  PD_STATUS_IO = 6,
  PD_STATUS_INTERNAL = 7,
  PD_STATUS_PANIC = 8,
} PdStatus;

typedef enum PdVariant {
  /**
   * Unaccelerated source iteration.
   */
  PD_VARIANT_NONE = 0,
  PD_VARIANT_SIP_DIRICHLET = 1,
  PD_VARIANT_SIP_MARSHAK = 2,
  PD_VARIANT_MIP_DIRICHLET = 3,
  PD_VARIANT_MIP_MARSHAK = 4,
} PdVariant;

typedef enum PdTermination {
  PD_TERMINATION_TOLERANCE = 0,
  PD_TERMINATION_CAP = 1,
  PD_TERMINATION_DIVERGENCE = 2,
} PdTermination;

/**
 * Opaque mesh handle.
 */
typedef struct PdMesh PdMesh;

/**
 * Opaque handle to an assembled manufactured-solution problem.
 */
typedef struct PdProblem PdProblem;

typedef struct PdMeshQuality {
  double anisotropy_ratio;
  double isoperimetric_min;
  double isoperimetric_mean;
  size_t facets_min;
  double facets_mean;
  size_t facets_max;
} PdMeshQuality;

typedef struct PdSolveSummary {
  /**
   * Empirical convergence factor, NaN when too few errors lie above the floor.
   */
  double rho;
  size_t iterations;
  bool divergent;
  enum PdTermination termination;
  /**
   * Broken L² error of the final iterate against the reference.
   */
  double final_error;
} PdSolveSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *pd_version(void);

/**
 * Copies the last error message of this thread into `buf` (truncated and
 * NUL-terminated) and returns the buffer size needed for the full message.
 *
 * # Safety
 * `buf` must be null or valid for writes of `len` bytes.
 */
size_t pd_last_error_message(char *buf, size_t len);

/**
 * Generates a Lloyd-relaxed bounded Voronoi mesh of the rectangle `[x0, x1] × [y0, y1]`.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum PdStatus pd_mesh_generate(double x0,
                               double y0,
                               double x1,
                               double y1,
                               size_t n_sites,
                               uint64_t seed,
                               size_t lloyd_iterations,
                               struct PdMesh **out);

/**
 * Reads a mesh in the plain-text `polymesh 2d` format.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` valid for a pointer write.
 */
enum PdStatus pd_mesh_read(const char *path, struct PdMesh **out);

/**
 * Writes a mesh in the plain-text `polymesh 2d` format.
 *
 * # Safety
 * `mesh` must be a live handle and `path` a NUL-terminated string.
 */
enum PdStatus pd_mesh_write(const struct PdMesh *mesh, const char *path);

/**
 * Releases a mesh handle. Problems built from it stay valid.
 *
 * # Safety
 * `mesh` must be null or a handle not yet freed.
 */
void pd_mesh_free(struct PdMesh *mesh);

/**
 * Number of cells, or 0 for a null handle.
 *
 * # Safety
 * `mesh` must be null or a live handle.
 */
size_t pd_mesh_num_cells(const struct PdMesh *mesh);

/**
 * Number of facets, or 0 for a null handle.
 *
 * # Safety
 * `mesh` must be null or a live handle.
 */
size_t pd_mesh_num_facets(const struct PdMesh *mesh);

/**
 * Largest cell diameter, or NaN for a null handle.
 *
 * # Safety
 * `mesh` must be null or a live handle.
 */
double pd_mesh_h(const struct PdMesh *mesh);

/**
 * # Safety
 * `mesh` must be a live handle and `out` valid for a write.
 */
enum PdStatus pd_mesh_quality(const struct PdMesh *mesh, struct PdMeshQuality *out);

/**
 * Assembles the manufactured-solution transport problem on `mesh` with
 * uniform `sigma_t` and scattering ratio `c`.
 *
 * # Safety
 * `mesh` must be a live handle and `out` valid for a pointer write.
 */
enum PdStatus pd_problem_new(const struct PdMesh *mesh,
                             size_t degree,
                             size_t n_q,
                             double sigma_t,
                             double c,
                             struct PdProblem **out);

/**
 * # Safety
 * `problem` must be null or a handle not yet freed.
 */
void pd_problem_free(struct PdProblem *problem);

/**
 * Scalar-flux unknowns, or 0 for a null handle.
 *
 * # Safety
 * `problem` must be null or a live handle.
 */
size_t pd_problem_num_dofs(const struct PdProblem *problem);

/**
 * Computes (once) the reference scalar flux and copies its coefficients into `out`.
 *
 * # Safety
 * `problem` must be a live handle and `out` valid for `len` writes.
 */
enum PdStatus pd_problem_reference_flux(struct PdProblem *problem, double *out, size_t len);

/**
 * Runs the outer iteration of `variant` from a zero initial guess and
 * summarises its convergence against the reference solution.
 *
 * # Safety
 * `problem` must be a live handle and `out` valid for a write.
 */
enum PdStatus pd_problem_solve(struct PdProblem *problem,
                               enum PdVariant variant,
                               double tolerance,
                               size_t max_iterations,
                               struct PdSolveSummary *out);

/**
 * Empirical convergence factor of an error history (see the Rust `empirical_rho`).
 *
 * # Safety
 * `errors` must be valid for `len` reads; `rho` and `window` valid for writes
 * (`window` may be null).
 */
enum PdStatus pd_empirical_rho(const double *errors,
                               size_t len,
                               double floor,
                               double *rho,
                               size_t *window);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYDSA_H */
