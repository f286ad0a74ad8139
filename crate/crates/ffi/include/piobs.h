#ifndef PIOBS_H
#define PIOBS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result code of every call. Values match the command-line exit codes
// where they overlap.
typedef enum PiobsStatus {
  PIOBS_STATUS_OK = 0,
  // The pair is not detectable; see [`piobs_last_witness`].
  PIOBS_STATUS_INFEASIBLE = 2,
  // Bad dimensions, non-finite data or an invalid option.
  PIOBS_STATUS_INVALID_INPUT = 3,
  // A numerical step failed.
  PIOBS_STATUS_NUMERICAL = 4,
  PIOBS_STATUS_NULL_POINTER = 5,
  // The output buffer is shorter than required.
  PIOBS_STATUS_BUFFER_TOO_SMALL = 6,
  // A Rust panic was caught at the boundary.
  PIOBS_STATUS_INTERNAL = 7,
} PiobsStatus;

// Opaque designed observer.
typedef struct PiobsObserver PiobsObserver;

// Opaque plant `(A, B, C)`.
typedef struct PiobsSystem PiobsSystem;

// Design options. Obtain defaults from [`piobs_design_options_default`].
typedef struct PiobsDesignOptions {
  // Required stability margin of the augmented matrix, in `[0, 1)`.
  double margin;
  uint64_t seed;
  // `Φ = phi_scalar·I_p`.
  double phi_scalar;
  // Number of target poles; 0 selects the default targets.
  size_t pole_count;
  // Real and imaginary parts, `pole_count` entries each.
  const double *poles_re;
  const double *poles_im;
} PiobsDesignOptions;

// Library version as a static NUL-terminated string.
const char *piobs_version(void);

// Message for the last failed call on this thread; empty after a
// successful call. Valid until the next call on this thread.
const char *piobs_last_error_message(void);

// Copies the witness eigenvalues of the last infeasible design on this
// thread. `*count` receives the number available; at most `capacity`
// are written.
//
// # Safety
// `re` and `im` must hold `capacity` doubles; `count` must be writable.
enum PiobsStatus piobs_last_witness(double *re, double *im, size_t capacity, size_t *count);

// Builds a plant from row-major `A` (`n×n`), `B` (`n×m`) and `C` (`p×n`).
// `C` must have full row rank.
//
// # Safety
// The arrays must hold the stated number of doubles; `out` must be
// writable. The handle is released with [`piobs_system_free`].
enum PiobsStatus piobs_system_new(size_t n,
                                  size_t m,
                                  size_t p,
                                  const double *a,
                                  const double *b,
                                  const double *c,
                                  struct PiobsSystem **out);

// # Safety
// `system` must come from [`piobs_system_new`] and not be used afterwards.
// Null is ignored.
void piobs_system_free(struct PiobsSystem *system);

// # Safety
// `system` must be a live handle; the outputs must be writable.
enum PiobsStatus piobs_system_dims(const struct PiobsSystem *system,
                                   size_t *n,
                                   size_t *m,
                                   size_t *p);

// # Safety
// `system` must be a live handle; `out` must be writable.
enum PiobsStatus piobs_is_detectable(const struct PiobsSystem *system, bool *out);

// # Safety
// `system` must be a live handle; `out` must be writable.
enum PiobsStatus piobs_is_observable(const struct PiobsSystem *system, bool *out);

// Defaults: margin `1e-6`, seed `0x5EED`, `Φ = 0.5·I`, default targets.
struct PiobsDesignOptions piobs_design_options_default(void);

// Designs a proportional-integral observer. `options` may be null for the
// defaults. On [`PiobsStatus::Infeasible`] the offending eigenvalues are
// available from [`piobs_last_witness`].
//
// # Safety
// `system` must be a live handle, `options` null or valid (with its pole
// arrays holding `pole_count` doubles), `out` writable. The handle is
// released with [`piobs_observer_free`].
enum PiobsStatus piobs_design(const struct PiobsSystem *system,
                              const struct PiobsDesignOptions *options,
                              struct PiobsObserver **out);

// # Safety
// `observer` must come from [`piobs_design`] and not be used afterwards.
// Null is ignored.
void piobs_observer_free(struct PiobsObserver *observer);

// Copies the proportional gain `L` (`n×p`, row-major) into `out`.
//
// # Safety
// `observer` must be a live handle; `out` must hold `len` doubles.
enum PiobsStatus piobs_observer_gain_l(const struct PiobsObserver *observer,
                                       double *out,
                                       size_t len);

// Copies the integral gain `F` (`n×p`, row-major) into `out`.
//
// # Safety
// As [`piobs_observer_gain_l`].
enum PiobsStatus piobs_observer_gain_f(const struct PiobsObserver *observer,
                                       double *out,
                                       size_t len);

// Copies the stabilizing injection `K` (`n×p`, row-major) into `out`.
//
// # Safety
// As [`piobs_observer_gain_l`].
enum PiobsStatus piobs_observer_gain_k(const struct PiobsObserver *observer,
                                       double *out,
                                       size_t len);

// Spectral radius of the augmented error matrix `[[A − LC, F], [−C, I]]`.
//
// # Safety
// `observer` must be a live handle; `out` must be writable.
enum PiobsStatus piobs_observer_spectral_radius(const struct PiobsObserver *observer, double *out);

// One observer update: `x̂⁺ = A·x̂ + L·(y − C·x̂) + B·u + F·v`,
// `v⁺ = v + y − C·x̂`. Lengths are `n` for `xhat`, `p` for `v` and `y`,
// `m` for `u`; the outputs may alias the inputs.
//
// # Safety
// Every array must hold its stated length; `u` may be null when `m = 0`.
enum PiobsStatus piobs_observer_step(const struct PiobsObserver *observer,
                                     const double *xhat,
                                     const double *v,
                                     const double *y,
                                     const double *u,
                                     double *xhat_next,
                                     double *v_next);

#endif  /* PIOBS_H */
