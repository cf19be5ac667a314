#ifndef FTRL_APPROACH_H
#define FTRL_APPROACH_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every exported function.
 */
typedef enum FtrlStatus {
  FTRL_STATUS_OK = 0,
  FTRL_STATUS_NULL_POINTER = 1,
  FTRL_STATUS_INVALID_INPUT = 2,
  FTRL_STATUS_CONFIG = 3,
  /**
   * An iterative solver stopped short of its tolerance.
   */
  FTRL_STATUS_SOLVER = 4,
  FTRL_STATUS_UNSUPPORTED = 5,
  FTRL_STATUS_IO = 6,
  /**
   * A run stopped on the oracle slack limit.
   */
  FTRL_STATUS_SLACK_LIMIT = 7,
  /**
   * A Rust panic was caught at the boundary.
   */
  FTRL_STATUS_INTERNAL = 8,
} FtrlStatus;

/**
 * Opaque experiment configuration.
 */
typedef struct FtrlConfig FtrlConfig;

/**
 * Opaque finished experiment.
 */
typedef struct FtrlExperiment FtrlExperiment;

/**
 * Per-seed summary of a finished experiment.
 */
typedef struct FtrlRecord {
  uint64_t seed;
  double final_support;
  double final_bound;
  double high_prob_bound;
  double regret;
  double slack_mean;
  size_t cuts_added;
  /**
   * Nonzero when every bound held on this run.
   */
  int32_t guarantee_holds;
  /**
   * Nonzero when the run stopped on the slack limit.
   */
  int32_t aborted;
} FtrlRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next call into the library on this thread.
 */
const char *ftrl_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ftrl_version(void);

/**
 * Parses and validates a JSON experiment config.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FtrlStatus ftrl_config_from_json(const char *json, struct FtrlConfig **out);

/**
 * # Safety
 * `cfg` must come from [`ftrl_config_from_json`] and not be used again.
 */
void ftrl_config_free(struct FtrlConfig *cfg);

/**
 * Runs every seed of the config. Runs that stop on the slack limit are
 * reported per record, not as a failed call.
 *
 * # Safety
 * `cfg` must be a live config handle and `out` a valid pointer.
 */
enum FtrlStatus ftrl_experiment_run(const struct FtrlConfig *cfg, struct FtrlExperiment **out);

/**
 * Number of per-seed records.
 *
 * # Safety
 * `exp` must be a live experiment handle or null.
 */
size_t ftrl_experiment_len(const struct FtrlExperiment *exp);

/**
 * Copies record `i` into `out`.
 *
 * # Safety
 * `exp` must be a live experiment handle and `out` a valid pointer.
 */
enum FtrlStatus ftrl_experiment_record(const struct FtrlExperiment *exp,
                                       size_t i,
                                       struct FtrlRecord *out);

/**
 * Writes `steps.csv` and `summary.json` into `dir`.
 *
 * # Safety
 * `exp` must be a live experiment handle and `dir` a NUL-terminated path.
 */
enum FtrlStatus ftrl_experiment_write(const struct FtrlExperiment *exp, const char *dir);

/**
 * # Safety
 * `exp` must come from [`ftrl_experiment_run`] and not be used again.
 */
void ftrl_experiment_free(struct FtrlExperiment *exp);

/**
 * `min_{a∈Δ} ‖a ⊙ y‖_p` for `y ≥ 0`; pass `INFINITY` for p = ∞. The
 * minimizing weights go to `weights` (length `n`) when it is not null.
 *
 * # Safety
 * `y` must point to `n` reals, `phi` must be valid, and `weights` must be
 * null or point to `n` writable reals.
 */
enum FtrlStatus ftrl_min_weighted_lp_norm(const double *y,
                                          size_t n,
                                          double p,
                                          double *phi,
                                          double *weights);

/**
 * Distance from `(y, y')` (length `2d`) to the global-cost cone for the
 * ℓp cost, in the matching composite norm.
 *
 * # Safety
 * `y` must point to `2d` reals and `out` must be valid.
 */
enum FtrlStatus ftrl_global_cost_distance(const double *y, size_t d, double p, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FTRL_APPROACH_H */
