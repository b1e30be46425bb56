#ifndef REVIVAL_H
#define REVIVAL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RevivalStatus {
  REVIVAL_STATUS_OK = 0,
  REVIVAL_STATUS_NULL_POINTER = 1,
  REVIVAL_STATUS_INVALID_ARGUMENT = 2,
  REVIVAL_STATUS_PARSE = 3,
  REVIVAL_STATUS_POLE = 4,
  REVIVAL_STATUS_INTEGRATOR_TOLERANCE = 5,
  REVIVAL_STATUS_LEVEL_NOT_BELOW_GROUND = 6,
  REVIVAL_STATUS_DEGENERATE_LEVEL = 7,
  REVIVAL_STATUS_NON_CONVERGENCE = 8,
  REVIVAL_STATUS_SINGULAR = 9,
  REVIVAL_STATUS_INCOMMENSURATE = 10,
  REVIVAL_STATUS_GRID_MISMATCH = 11,
  REVIVAL_STATUS_IO = 12,
  REVIVAL_STATUS_BUFFER_TOO_SMALL = 13,
  REVIVAL_STATUS_PANIC = 14,
} RevivalStatus;

typedef enum RevivalStencil {
  REVIVAL_STENCIL_THREE_POINT = 0,
  REVIVAL_STENCIL_FIVE_POINT = 1,
} RevivalStencil;

/**
 * A fully resolved job description.
 */
typedef struct RevivalJob RevivalJob;

/**
 * Exact level set.
 */
typedef struct RevivalLevels RevivalLevels;

/**
 * Sampled potential on a uniform grid.
 */
typedef struct RevivalPotential RevivalPotential;

/**
 * `E_n = a·N_n + b` with `a`, `b` as reduced fractions.
 */
typedef struct RevivalParams {
  int64_t a_num;
  int64_t a_den;
  int64_t b_num;
  int64_t b_den;
  double t_rev;
} RevivalParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next call into this library from the same thread.
 */
const char *revival_last_error(void);

/**
 * Static, NUL-terminated version string.
 */
const char *revival_version(void);

/**
 * Levels `num[i]/den[i]`; they must be strictly increasing.
 *
 * # Safety
 * `num` and `den` point to `len` values; `out` is writable.
 */
enum RevivalStatus revival_levels_new(const int64_t *num,
                                      const int64_t *den,
                                      size_t len,
                                      struct RevivalLevels **out);

/**
 * The lowest `count` levels `n + 1/2` of the harmonic oscillator.
 *
 * # Safety
 * `out` is writable.
 */
enum RevivalStatus revival_levels_harmonic(size_t count, struct RevivalLevels **out);

/**
 * `n_added` levels spaced by 2 below the ground, then `harmonic_count`
 * oscillator levels.
 *
 * # Safety
 * `out` is writable.
 */
enum RevivalStatus revival_levels_biperiodic(size_t n_added,
                                             size_t harmonic_count,
                                             struct RevivalLevels **out);

/**
 * The first `count` primes.
 *
 * # Safety
 * `out` is writable.
 */
enum RevivalStatus revival_levels_primes(size_t count, struct RevivalLevels **out);

/**
 * `count` distinct Fibonacci numbers starting at 1.
 *
 * # Safety
 * `out` is writable.
 */
enum RevivalStatus revival_levels_fibonacci(size_t count, struct RevivalLevels **out);

/**
 * # Safety
 * `levels` is a live handle or NULL.
 */
size_t revival_levels_len(const struct RevivalLevels *levels);

/**
 * Level `index` as a reduced fraction.
 *
 * # Safety
 * `levels` is a live handle; `num` and `den` are writable.
 */
enum RevivalStatus revival_levels_get(const struct RevivalLevels *levels,
                                      size_t index,
                                      int64_t *num,
                                      int64_t *den);

/**
 * Revival spacing, offset and period of a level set.
 *
 * # Safety
 * `levels` is a live handle; `out` is writable.
 */
enum RevivalStatus revival_levels_params(const struct RevivalLevels *levels,
                                         struct RevivalParams *out);

/**
 * # Safety
 * `levels` came from this library and is not used afterwards.
 */
void revival_levels_free(struct RevivalLevels *levels);

/**
 * Parses a TOML job description and fills in every default.
 *
 * # Safety
 * `toml` is a NUL-terminated string; `out` is writable.
 */
enum RevivalStatus revival_job_from_toml(const char *toml, struct RevivalJob **out);

/**
 * Copy of the job's target level set.
 *
 * # Safety
 * `job` is a live handle; `out` is writable.
 */
enum RevivalStatus revival_job_levels(const struct RevivalJob *job, struct RevivalLevels **out);

/**
 * Builds the designed potential.
 *
 * # Safety
 * `job` is a live handle; `out` is writable.
 */
enum RevivalStatus revival_job_design(const struct RevivalJob *job, struct RevivalPotential **out);

/**
 * Autocorrelation `A(t)` of the job's packet in `potential` at `n` times.
 * `residual` (optional) receives the norm of the discarded continuum part.
 *
 * # Safety
 * `times`, `re` and `im` hold `n` values; handles are live.
 */
enum RevivalStatus revival_job_autocorrelation(const struct RevivalJob *job,
                                               const struct RevivalPotential *potential,
                                               const double *times,
                                               size_t n,
                                               double *re,
                                               double *im,
                                               double *residual);

/**
 * # Safety
 * `job` came from this library and is not used afterwards.
 */
void revival_job_free(struct RevivalJob *job);

/**
 * Reads an `x,V` CSV written by the design step.
 *
 * # Safety
 * `path` is a NUL-terminated string; `out` is writable.
 */
enum RevivalStatus revival_potential_read_csv(const char *path, struct RevivalPotential **out);

/**
 * # Safety
 * `potential` is a live handle or NULL.
 */
size_t revival_potential_len(const struct RevivalPotential *potential);

/**
 * Copies grid points and values; both buffers must hold `len` entries, and
 * `len` must equal the number of grid points.
 *
 * # Safety
 * `x` and `v` are writable for `len` values.
 */
enum RevivalStatus revival_potential_samples(const struct RevivalPotential *potential,
                                             double *x,
                                             double *v,
                                             size_t len);

/**
 * Evaluates the potential anywhere inside the grid.
 *
 * # Safety
 * `potential` is a live handle; `out` is writable.
 */
enum RevivalStatus revival_potential_eval(const struct RevivalPotential *potential,
                                          double x,
                                          double *out);

/**
 * The `k` lowest eigenvalues with Dirichlet ends. `stencil` is a
 * `RevivalStencil` value.
 *
 * # Safety
 * `out` is writable for `k` values.
 */
enum RevivalStatus revival_potential_eigenvalues(const struct RevivalPotential *potential,
                                                 int32_t stencil,
                                                 size_t k,
                                                 double *out);

/**
 * Compares the computed spectrum with `levels`. `max_error` and `passed`
 * are written even when the tolerance is missed; the status is then still
 * `Ok`.
 *
 * # Safety
 * Handles are live; `max_error` and `passed` are writable.
 */
enum RevivalStatus revival_potential_verify(const struct RevivalPotential *potential,
                                            const struct RevivalLevels *levels,
                                            double tolerance,
                                            int32_t stencil,
                                            double *max_error,
                                            bool *passed);

/**
 * # Safety
 * `potential` came from this library and is not used afterwards.
 */
void revival_potential_free(struct RevivalPotential *potential);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REVIVAL_H */
