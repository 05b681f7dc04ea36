#ifndef SEALINK_H
#define SEALINK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  SEALINK_STATUS_OK = 0,
  SEALINK_STATUS_NULL_POINTER = 1,
  SEALINK_STATUS_INVALID_ARGUMENT = 2,
  SEALINK_STATUS_CONFIG_ERROR = 3,
  SEALINK_STATUS_NUMERIC_ERROR = 4,
  SEALINK_STATUS_PANIC = 5,
} SealinkStatus;

typedef enum {
  SEALINK_MODE_DISTRIBUTIONAL = 0,
  SEALINK_MODE_POSITIONAL = 1,
} SealinkMode;

// Opaque scenario handle.
typedef struct SealinkScenario SealinkScenario;

// Analytic results at one operating point. Probabilities in [0, 1], rates in bit/s.
typedef struct {
  double p_bd;
  double p_esd;
  double p_s;
  double c_bd;
  double c_esd;
  double c_s;
} SealinkTheory;

// A Monte Carlo estimate with its 95% half-width.
typedef struct {
  double value;
  double half_width;
} SealinkEstimate;

typedef struct {
  SealinkEstimate p_bd;
  SealinkEstimate p_esd;
  SealinkEstimate p_s;
  SealinkEstimate c_bd;
  SealinkEstimate c_esd;
  SealinkEstimate c_s;
  uint64_t n_trials;
} SealinkMcResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// A scenario with the reference parameter set. Never returns null.
SealinkScenario *sealink_scenario_new_default(void);

// Parses TOML configuration text. On success `*out` owns a new handle.
//
// # Safety
// `toml` must be a NUL-terminated string and `out` a valid pointer.
SealinkStatus sealink_scenario_from_config(const char *toml, SealinkScenario **out);

// Sets one configuration key, e.g. `("scenario.tau", "8 dB")` or `("constellation.n_sats", "500")`.
// The handle is unchanged if the result does not validate.
//
// # Safety
// `scenario` must come from this library; `key` and `value` must be NUL-terminated.
SealinkStatus sealink_scenario_set(SealinkScenario *scenario, const char *key, const char *value);

// Releases a handle. Null is ignored.
//
// # Safety
// `scenario` must come from this library and must not be used afterwards.
void sealink_scenario_free(SealinkScenario *scenario);

// Threshold of the scenario in dB.
//
// # Safety
// `scenario` must come from this library and `out` must be valid.
SealinkStatus sealink_scenario_tau_db(const SealinkScenario *scenario, double *out);

// Analytic success probabilities and capacities.
//
// # Safety
// `scenario` must come from this library and `out` must be valid.
SealinkStatus sealink_theory(const SealinkScenario *scenario, SealinkTheory *out);

// End-to-end success probability only; cheaper than [`sealink_theory`].
//
// # Safety
// `scenario` must come from this library and `out` must be valid.
SealinkStatus sealink_p_s(const SealinkScenario *scenario, double *out);

// Average rate capacity in bit/s; cheaper than [`sealink_theory`].
//
// # Safety
// `scenario` must come from this library and `out` must be valid.
SealinkStatus sealink_capacity(const SealinkScenario *scenario, double *out);

// Monte Carlo estimate. Results depend only on `(scenario, mode, n_trials, seed)`.
//
// # Safety
// `scenario` must come from this library and `out` must be valid.
SealinkStatus sealink_mc_run(const SealinkScenario *scenario,
                             SealinkMode mode,
                             uint64_t n_trials,
                             uint64_t seed,
                             SealinkMcResult *out);

// Copies the last error message of this thread into `buf` (NUL-terminated,
// truncated to `len`). Returns the full message length excluding the NUL, so
// a call with `len = 0` sizes the buffer.
//
// # Safety
// `buf` must be valid for `len` bytes or null with `len = 0`.
uintptr_t sealink_last_error(char *buf, uintptr_t len);

// Library version as a static NUL-terminated string.
const char *sealink_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SEALINK_H */
