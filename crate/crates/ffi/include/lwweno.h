#ifndef LWWENO_H
#define LWWENO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. `Config` and `Positivity` carry the CLI's exit codes 1 and
 * 2. A failed step or run leaves the handle at its state before the call.
 */
typedef enum LwStatus {
  LW_STATUS_OK = 0,
  LW_STATUS_CONFIG = 1,
  LW_STATUS_POSITIVITY = 2,
  LW_STATUS_NULL_ARGUMENT = 3,
  LW_STATUS_INVALID_STATE = 4,
  LW_STATUS_UNSUPPORTED_ORDER = 5,
  LW_STATUS_IO = 6,
  LW_STATUS_INTERNAL = 7,
} LwStatus;

/**
 * Opaque simulation handle.
 */
typedef struct LwSimulation LwSimulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a simulation of `problem` (`advection`, `burgers`, `euler1d`,
 * `euler2d-smooth`, `dmr`) with `scheme` (`rk3`, `lw`, `lwa`, `lwf`,
 * `lwaf`). `ny == 0` selects the problem's default aspect. On success
 * `*out` owns a new handle.
 *
 * # Safety
 * `problem` and `scheme` must be NUL-terminated strings; `out` must be a
 * valid pointer.
 */
enum LwStatus lw_simulation_new(const char *problem,
                                const char *scheme,
                                uint32_t space_order,
                                uint32_t time_order,
                                uint32_t nx,
                                uint32_t ny,
                                double cfl,
                                struct LwSimulation **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `sim` must come from [`lw_simulation_new`] and not be used afterwards.
 */
void lw_simulation_free(struct LwSimulation *sim);

/**
 * Takes one CFL step, clipped so the time does not pass `t_max`. The step
 * size is written to `delta` when it is non-null.
 *
 * # Safety
 * `sim` must be a live handle; `delta` null or valid.
 */
enum LwStatus lw_simulation_step(struct LwSimulation *sim, double t_max, double *delta);

/**
 * Marches to `t_end`.
 *
 * # Safety
 * `sim` must be a live handle.
 */
enum LwStatus lw_simulation_run_until(struct LwSimulation *sim, double t_end);

/**
 * Current simulation time (NaN for a null handle).
 *
 * # Safety
 * `sim` must be null or a live handle.
 */
double lw_simulation_time(const struct LwSimulation *sim);

/**
 * Number of steps taken so far (0 for a null handle).
 *
 * # Safety
 * `sim` must be null or a live handle.
 */
uint64_t lw_simulation_steps(const struct LwSimulation *sim);

/**
 * Interior node counts and number of conserved components.
 *
 * # Safety
 * `sim` must be a live handle; the output pointers must be valid.
 */
enum LwStatus lw_simulation_shape(const struct LwSimulation *sim,
                                  size_t *nx,
                                  size_t *ny,
                                  size_t *ncomp);

/**
 * Copies interior component `c` (row-major, x fastest) into `buf`, which
 * must hold exactly `nx * ny` values.
 *
 * # Safety
 * `sim` must be a live handle and `buf` valid for `len` writes.
 */
enum LwStatus lw_simulation_component(const struct LwSimulation *sim,
                                      size_t c,
                                      double *buf,
                                      size_t len);

/**
 * Writes the current state in the CLI's dump format into `dir` (created if
 * missing), adding a schlieren image for 2D gas dynamics.
 *
 * # Safety
 * `sim` must be a live handle and `dir` a NUL-terminated string.
 */
enum LwStatus lw_simulation_dump(const struct LwSimulation *sim, const char *dir);

/**
 * Message of the last failed call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *lw_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *lw_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LWWENO_H */
