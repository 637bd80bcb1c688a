#ifndef FRACSG_H
#define FRACSG_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define FSG_METHOD_CG 0

#define FSG_METHOD_DIRECT 1

#define FSG_PRECOND_NONE 0

#define FSG_PRECOND_CIRCULANT 1

#define FSG_PROBLEM_BREATHER 0

#define FSG_PROBLEM_SECH_PULSE 1

typedef enum FsgStatus {
  FSG_STATUS_OK = 0,
  FSG_STATUS_NULL_POINTER = 1,
  FSG_STATUS_INVALID_ARGUMENT = 2,
  FSG_STATUS_LENGTH_MISMATCH = 3,
  FSG_STATUS_NUMERICAL = 4,
  FSG_STATUS_PANIC = 5,
} FsgStatus;

/**
 * Discrete fractional Laplacian on a uniform grid.
 */
typedef struct FsgOperator FsgOperator;

/**
 * Time-stepping state for one run.
 */
typedef struct FsgSimulation FsgSimulation;

/**
 * Flat scheme configuration. Fill with [`fsg_scheme_config_default`] and
 * override fields as needed. `cg_max_iter = 0` means ten times the number of
 * unknowns.
 */
typedef struct FsgSchemeConfig {
  double alpha;
  double a;
  double b;
  size_t subintervals;
  double t_final;
  size_t steps;
  uint32_t method;
  uint32_t precond;
  double cg_rel_tol;
  size_t cg_max_iter;
  double startup_tol;
  size_t startup_max_iter;
} FsgSchemeConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *fsg_version(void);

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next call into the library from the same thread.
 */
const char *fsg_last_error(void);

/**
 * Writes `c_0 .. c_{len-1}` of the fractional centered-difference kernel.
 *
 * # Safety
 * `out` must point to `len` writable doubles.
 */
enum FsgStatus fsg_kernel_coefficients(double alpha,
                                       double *out,
                                       size_t len);

/**
 * Breather solution of the classical equation at `(x, t)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum FsgStatus fsg_exact_breather(double x,
                                  double t,
                                  double omega,
                                  double *out);

/**
 * Creates the operator for `alpha` on `(a, b)` split into `subintervals` cells.
 *
 * # Safety
 * `out` must be a valid pointer; on success it receives a handle to free with
 * [`fsg_operator_free`].
 */
enum FsgStatus fsg_operator_new(double alpha,
                                double a,
                                double b,
                                size_t subintervals,
                                struct FsgOperator **out);

/**
 * # Safety
 * `op` must be NULL or a handle from [`fsg_operator_new`] not yet freed.
 */
void fsg_operator_free(struct FsgOperator *op);

/**
 * Number of interior unknowns.
 *
 * # Safety
 * `op` and `len` must be valid pointers.
 */
enum FsgStatus fsg_operator_len(const struct FsgOperator *op,
                                size_t *len);

/**
 * Circulant embedding length used by the FFT path.
 *
 * # Safety
 * `op` and `len` must be valid pointers.
 */
enum FsgStatus fsg_operator_embedding_len(const struct FsgOperator *op,
                                          size_t *len);

/**
 * `out = h^{-alpha} C u`, through the FFT path when `use_fft` is nonzero and
 * the dense O(n²) path otherwise.
 *
 * # Safety
 * `u` and `out` must each point to `len` doubles; they may not overlap.
 */
enum FsgStatus fsg_operator_apply(const struct FsgOperator *op,
                                  const double *u,
                                  double *out,
                                  size_t len,
                                  int32_t use_fft);

/**
 * `h^{1-alpha} uᵀ C u`.
 *
 * # Safety
 * `u` must point to `len` doubles and `out` must be valid.
 */
enum FsgStatus fsg_operator_seminorm_sq(const struct FsgOperator *op,
                                        const double *u,
                                        size_t len,
                                        double *out);

/**
 * Defaults: alpha 2 on (-20, 20) with 200 cells, T = 1 in 50 steps, CG with
 * relative tolerance 1e-12.
 *
 * # Safety
 * `cfg` must be a valid pointer.
 */
enum FsgStatus fsg_scheme_config_default(struct FsgSchemeConfig *cfg);

/**
 * Starts a run of `problem` (`FSG_PROBLEM_*`); `omega` is used by the breather.
 *
 * # Safety
 * `cfg` and `out` must be valid pointers; on success `*out` must later be
 * released with [`fsg_simulation_free`].
 */
enum FsgStatus fsg_simulation_new(const struct FsgSchemeConfig *cfg,
                                  uint32_t problem,
                                  double omega,
                                  struct FsgSimulation **out);

/**
 * # Safety
 * `sim` must be NULL or a handle from [`fsg_simulation_new`] not yet freed.
 */
void fsg_simulation_free(struct FsgSimulation *sim);

/**
 * Advances by at most `count` steps, stopping at the final time. Writes the
 * number of steps taken to `taken` when it is not NULL.
 *
 * # Safety
 * `sim` must be a valid handle; `taken` may be NULL.
 */
enum FsgStatus fsg_simulation_step(struct FsgSimulation *sim,
                                   size_t count,
                                   size_t *taken);

/**
 * Current level index, time and whether the final time has been reached.
 *
 * # Safety
 * `sim` must be a valid handle; each output pointer may be NULL.
 */
enum FsgStatus fsg_simulation_status(const struct FsgSimulation *sim,
                                     size_t *level,
                                     double *time,
                                     int32_t *finished);

/**
 * Copies the current `U`, `V`, `W` (any of them may be NULL to skip).
 *
 * # Safety
 * `sim` must be a valid handle; non-NULL arrays must hold `len` doubles.
 */
enum FsgStatus fsg_simulation_state(const struct FsgSimulation *sim,
                                    double *u,
                                    double *v,
                                    double *w,
                                    size_t len);

/**
 * Discrete energy of the current level.
 *
 * # Safety
 * `sim` and `out` must be valid pointers.
 */
enum FsgStatus fsg_simulation_energy(const struct FsgSimulation *sim,
                                     double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRACSG_H */
