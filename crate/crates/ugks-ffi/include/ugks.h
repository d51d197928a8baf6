#ifndef UGKS_H
#define UGKS_H

/* Generated by cbindgen from crates/ugks-ffi; do not edit. */

#include <stddef.h>
#include <stdint.h>

// Status codes; the numeric values of 2–4 match the CLI exit codes.
typedef enum UgksStatus {
  UGKS_STATUS_OK = 0,
  UGKS_STATUS_NULL_POINTER = 1,
  UGKS_STATUS_CONFIG_ERROR = 2,
  UGKS_STATUS_SOLVER_FAILURE = 3,
  UGKS_STATUS_INVARIANT_VIOLATION = 4,
  UGKS_STATUS_BUFFER_TOO_SMALL = 5,
  UGKS_STATUS_PANIC = 6,
} UgksStatus;

// Opaque solver handle.
typedef struct UgksSolver UgksSolver;

// Summary of one time step.
typedef struct UgksStepInfo {
  double dt;
  double time;
  uint32_t sweeps;
  double min_rho;
  double max_residual;
  double err_ap;
} UgksStepInfo;

// Interface kernel values at one (Δt, σ, β).
typedef struct UgksKernels {
  double alpha;
  double b;
  double c;
  double d;
  double nu;
  double kappa;
  double b_over_alpha;
} UgksKernels;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *ugks_version(void);

// Copy the calling thread's last error message into `buf` (NUL-terminated,
// truncated to `len`). Returns the full message length without the NUL.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t ugks_last_error_message(char *buf, size_t len);

// Create a solver for a registered scenario. `preset` may be null ("desk").
//
// # Safety
// String arguments must be null or NUL-terminated; `out` must be writable.
enum UgksStatus ugks_solver_create(const char *scenario,
                                   const char *preset,
                                   struct UgksSolver **out);

// Create a solver from configuration text in the CLI's TOML format.
//
// # Safety
// `config` must be NUL-terminated; `out` must be writable.
enum UgksStatus ugks_solver_create_from_config(const char *config, struct UgksSolver **out);

// Release a handle. Null is ignored.
//
// # Safety
// `h` must come from a create call and not be used afterwards.
void ugks_solver_free(struct UgksSolver *h);

// Grid dimensions.
//
// # Safety
// `h` must be a live handle; `nx`, `ny` writable.
enum UgksStatus ugks_solver_dims(struct UgksSolver *h, size_t *nx, size_t *ny);

// Current simulation time.
//
// # Safety
// `h` must be a live handle; `t` writable.
enum UgksStatus ugks_solver_time(struct UgksSolver *h, double *t);

// The scenario's step: its Δt law, capped by the positivity bound when
// limiting is on.
//
// # Safety
// `h` must be a live handle; `dt` writable.
enum UgksStatus ugks_solver_nominal_dt(struct UgksSolver *h, double *dt);

// Advance one step of size `dt`. `info` may be null.
//
// # Safety
// `h` must be a live handle; `info` null or writable.
enum UgksStatus ugks_solver_step(struct UgksSolver *h, double dt, struct UgksStepInfo *info);

// Advance with the scenario's step control until `t_end`, landing on it
// exactly. `info` (may be null) receives the last step.
//
// # Safety
// `h` must be a live handle; `info` null or writable.
enum UgksStatus ugks_solver_advance_to(struct UgksSolver *h,
                                       double t_end,
                                       struct UgksStepInfo *info);

// Copy the radiation energy density ρ, row-major with x fastest, into `buf`
// (at least nx·ny values).
//
// # Safety
// `h` must be a live handle; `buf` must hold `len` doubles.
enum UgksStatus ugks_solver_copy_rho(struct UgksSolver *h, double *buf, size_t len);

// Copy the material temperature, same layout as [`ugks_solver_copy_rho`].
//
// # Safety
// `h` must be a live handle; `buf` must hold `len` doubles.
enum UgksStatus ugks_solver_copy_temperature(struct UgksSolver *h, double *buf, size_t len);

// Evaluate the interface kernels for constants (a, c, ε).
//
// # Safety
// `out` must be writable.
enum UgksStatus ugks_kernels(double dt,
                             double sigma,
                             double beta,
                             double a,
                             double c,
                             double eps,
                             struct UgksKernels *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* UGKS_H */
