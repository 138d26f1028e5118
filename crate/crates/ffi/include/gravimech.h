#ifndef GRAVIMECH_H
#define GRAVIMECH_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Settable experiment parameters, matching the command-line overrides.
 */
typedef enum GmParam {
  GM_PARAM_OMEGA_M = 0,
  GM_PARAM_OMEGA_SN = 1,
  GM_PARAM_PULSE_N = 2,
  GM_PARAM_PULSE_TP = 3,
  GM_PARAM_PULSE_TWAIT = 4,
  GM_PARAM_TEMPERATURE_K = 5,
  GM_PARAM_Q_FACTOR = 6,
} GmParam;

typedef enum GmStatus {
  GM_STATUS_OK = 0,
  GM_STATUS_NULL_POINTER = 1,
  GM_STATUS_INVALID_ARGUMENT = 2,
  GM_STATUS_CONFIG = 3,
  GM_STATUS_NUMERICAL = 4,
  GM_STATUS_IO = 5,
  GM_STATUS_PANIC = 6,
} GmStatus;

/**
 * Opaque experiment handle.
 */
typedef struct GmExperiment GmExperiment;

typedef struct GmComparison {
  double omega_sn;
  double eps2;
  double p0_qm;
  double p0_sn;
  double p0_cwl;
  double p0_sn_exact;
  double p0_thermal;
  int sn_regime_ok;
  int cwl_regime_ok;
  int thermal_regime_ok;
} GmComparison;

typedef struct GmPrediction {
  double p0;
  double p1;
  double eps2;
  int regime_ok;
} GmPrediction;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length in bytes, excluding
 * the terminator; pass a null `buf` to query it.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t gm_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gm_version(void);

/**
 * Parse a TOML configuration with all four sections.
 *
 * # Safety
 * `toml` must be a NUL-terminated string; `out` must be writable.
 */
enum GmStatus gm_experiment_from_toml(const char *toml, struct GmExperiment **out);

/**
 * Load a TOML or JSON configuration file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum GmStatus gm_experiment_load(const char *path, struct GmExperiment **out);

/**
 * # Safety
 * `handle` must be null or come from a `gm_experiment_*` constructor and not
 * have been freed.
 */
void gm_experiment_free(struct GmExperiment *handle);

/**
 * Override one parameter. The handle is left unchanged on error.
 *
 * # Safety
 * `handle` must be a live experiment handle.
 */
enum GmStatus gm_experiment_set(struct GmExperiment *handle, enum GmParam param, double value);

/**
 * Run the three-theory comparison.
 *
 * # Safety
 * `handle` must be a live experiment handle; `out` must be writable.
 */
enum GmStatus gm_experiment_compare(const struct GmExperiment *handle, struct GmComparison *out);

/**
 * CWL photon-return probabilities for one pulse protocol (rad/s, s).
 *
 * # Safety
 * `out` must be writable.
 */
enum GmStatus gm_cwl_probabilities(double omega_m,
                                   double omega_sn,
                                   uint32_t n,
                                   double t_p,
                                   double t_wait,
                                   struct GmPrediction *out);

/**
 * SN photon-return probabilities; `p0_exact` receives the exact two-pulse
 * composition and may be null.
 *
 * # Safety
 * `out` must be writable; `p0_exact` must be null or writable.
 */
enum GmStatus gm_sn_probabilities(double omega_m,
                                  double omega_sn,
                                  uint32_t n,
                                  double t_wait,
                                  struct GmPrediction *out,
                                  double *p0_exact);

/**
 * Thermal zero-photon probability (SI units). `regime_ok` may be null.
 *
 * # Safety
 * `p0_th` must be writable; `regime_ok` must be null or writable.
 */
enum GmStatus gm_thermal_p0(double omega_m,
                            double q_factor,
                            double temperature_k,
                            double t_p,
                            double *p0_th,
                            int *regime_ok);

/**
 * Zero-point plus thermal ionic spread ξ₀ in metres, from lab units
 * (kg/m³, amu, kelvin, metres).
 *
 * # Safety
 * `out` must be writable.
 */
enum GmStatus gm_xi0(double density,
                     double ionic_mass_amu,
                     double debye_temp_k,
                     double lattice_spacing,
                     double temperature_k,
                     double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRAVIMECH_H */
