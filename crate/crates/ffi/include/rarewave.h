#ifndef RAREWAVE_H
#define RAREWAVE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define RW_OK 0

#define RW_ERR_NULL 1

#define RW_ERR_CONFIG 2

#define RW_ERR_DOMAIN 3

#define RW_ERR_NUMERICAL 4

#define RW_ERR_PRECONDITION 5

#define RW_ERR_HYPOTHESIS 6

#define RW_ERR_IO 7

#define RW_ERR_UTF8 8

#define RW_ERR_BUFFER 9

#define RW_ERR_RANGE 10

#define RW_ERR_PANIC 11

/**
 * Parsed, validated run configuration.
 */
typedef struct RwConfig RwConfig;

/**
 * Result of one run with its analyses.
 */
typedef struct RwRun RwRun;

/**
 * Exact solution of a 1D Riemann problem.
 */
typedef struct RwWaveFan RwWaveFan;

/**
 * Per-window summary of a run.
 */
typedef struct RwWindowStats {
  double t;
  double kappa_over_t;
  double that1_plus_1;
  double that2;
  double chi;
  double zeta;
  double eta;
  double yring;
  double l_mu_min;
  double t_wbar_max;
  double lbar_wbar_max;
  double y_residual_l1;
  double z_residual_l1;
  double l_kappa_residual_l1;
} RwWindowStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf`.
 *
 * # Safety
 * `buf` must point to `len` writable bytes or be null; `needed` must be
 * null or writable.
 */
int32_t rw_last_error(char *buf, size_t len, size_t *needed);

/**
 * Parses configuration text; empty text gives the defaults.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
int32_t rw_config_parse(const char *text_, struct RwConfig **out);

/**
 * # Safety
 * `cfg` must come from `rw_config_parse` and not be used afterwards.
 */
void rw_config_free(struct RwConfig *cfg);

/**
 * Executes a run without writing files.
 *
 * # Safety
 * `cfg` must be a live handle; `out` must be writable.
 */
int32_t rw_run_execute(const struct RwConfig *cfg, struct RwRun **out);

/**
 * # Safety
 * `run` must come from `rw_run_execute` and not be used afterwards.
 */
void rw_run_free(struct RwRun *run);

/**
 * `L1` error of the final row 0 against the exact fan, and the largest
 * variation across `x2`.
 *
 * # Safety
 * `run` must be a live handle; out-pointers must be writable.
 */
int32_t rw_run_fan_error(const struct RwRun *run, double *l1, double *x2_variation);

/**
 * # Safety
 * `run` must be a live handle; `count` must be writable.
 */
int32_t rw_run_window_count(const struct RwRun *run, size_t *count);

/**
 * # Safety
 * `run` must be a live handle; `out` must be writable.
 */
int32_t rw_run_window(const struct RwRun *run, size_t index, struct RwWindowStats *out);

/**
 * The energy report as CSV.
 *
 * # Safety
 * As for `rw_last_error`, and `run` must be a live handle.
 */
int32_t rw_run_energy_csv(const struct RwRun *run, char *buf, size_t len, size_t *needed);

/**
 * The whole run result as JSON.
 *
 * # Safety
 * As for `rw_run_energy_csv`.
 */
int32_t rw_run_json(const struct RwRun *run, char *buf, size_t len, size_t *needed);

/**
 * Solves the Riemann problem with states `(v, c)` on either side.
 *
 * # Safety
 * `out` must be writable.
 */
int32_t rw_riemann_solve(double gamma,
                         double k0,
                         double v_left,
                         double c_left,
                         double v_right,
                         double c_right,
                         struct RwWaveFan **out);

/**
 * # Safety
 * `fan` must come from `rw_riemann_solve` and not be used afterwards.
 */
void rw_wave_fan_free(struct RwWaveFan *fan);

/**
 * State at `x / t = xi`.
 *
 * # Safety
 * `fan` must be a live handle; out-pointers must be writable.
 */
int32_t rw_wave_fan_evaluate(const struct RwWaveFan *fan, double xi, double *v, double *c);

/**
 * # Safety
 * As for `rw_run_energy_csv`, with a live `fan`.
 */
int32_t rw_wave_fan_json(const struct RwWaveFan *fan, char *buf, size_t len, size_t *needed);

/**
 * State of the centered rarefaction fan ending on `(v0, c0)` at `(x, t)`.
 *
 * # Safety
 * Out-pointers must be writable.
 */
int32_t rw_centered_fan_state(double gamma,
                              double k0,
                              double v0,
                              double c0,
                              double x,
                              double t,
                              double *v,
                              double *c);

/**
 * Checks a Gronwall instance given as JSON. On success `max_ratio`
 * receives the largest ratio to the conclusion's bound and `pass` whether
 * the conclusion holds. A violated hypothesis returns `RW_ERR_HYPOTHESIS`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; out-pointers must be writable.
 */
int32_t rw_gronwall_verify(const char *json, double *max_ratio, bool *pass);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* RAREWAVE_H */
