/* Copyright 2026 The snear Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the snear simulator. Every function returns a status code;
 * on failure snear_last_error() describes the problem for the calling thread.
 * Strings returned through char** are owned by the caller and released with
 * snear_string_free. */

#ifndef SNEAR_SNEAR_H
#define SNEAR_SNEAR_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#  if defined(SNEAR_BUILDING_LIBRARY)
#    define SNEAR_API __declspec(dllexport)
#  else
#    define SNEAR_API __declspec(dllimport)
#  endif
#else
#  define SNEAR_API __attribute__((visibility("default")))
#endif

typedef enum snear_status {
  SNEAR_OK = 0,
  SNEAR_ERR_PARAMETER = 1,
  SNEAR_ERR_GENERATION = 2,
  SNEAR_ERR_NUMERIC = 3,
  SNEAR_ERR_PARSE = 4,
  SNEAR_ERR_CONVERGENCE = 5,
  SNEAR_ERR_UNSUPPORTED = 6,
  SNEAR_ERR_INVARIANT = 7,
  SNEAR_ERR_CONFIG = 8,
  SNEAR_ERR_IO = 9,
  SNEAR_ERR_INTERNAL = 10
} snear_status;

typedef struct snear_experiment snear_experiment;
typedef struct snear_report snear_report;

SNEAR_API const char* snear_version(void);
SNEAR_API const char* snear_status_string(snear_status status);
SNEAR_API const char* snear_last_error(void);
SNEAR_API void snear_string_free(char* s);

/* Newline-separated "name<TAB>description" lines. */
SNEAR_API snear_status snear_preset_list(char** out);

SNEAR_API snear_status snear_experiment_from_file(const char* path, snear_experiment** out);
SNEAR_API snear_status snear_experiment_from_text(const char* text, snear_experiment** out);
SNEAR_API snear_status snear_experiment_from_preset(const char* name, snear_experiment** out);
/* Overrides one config key; an empty value removes the key. */
SNEAR_API snear_status snear_experiment_set(snear_experiment* exp, const char* key,
                                            const char* value);
SNEAR_API snear_status snear_experiment_config_text(const snear_experiment* exp, char** out);
/* Resolves the configuration and reports schema errors without running. */
SNEAR_API snear_status snear_experiment_validate(const snear_experiment* exp);
SNEAR_API void snear_experiment_free(snear_experiment* exp);

/* mode: "run", "sweep", "compare" or "bounds". */
SNEAR_API snear_status snear_experiment_run(const snear_experiment* exp, const char* mode,
                                            snear_report** out);

SNEAR_API snear_status snear_report_write(const snear_report* report);
SNEAR_API snear_status snear_report_summary(const snear_report* report, char** out);
SNEAR_API snear_status snear_report_bounds(const snear_report* report, char** out);
SNEAR_API int snear_report_cell_count(const snear_report* report);
SNEAR_API int snear_report_method_count(const snear_report* report, int cell);
SNEAR_API snear_status snear_report_method_name(const snear_report* report, int cell, int method,
                                                char** out);
/* Median over seeds of the steady-state ||xbar - x*||^2 (+inf if diverged). */
SNEAR_API snear_status snear_report_steady_error(const snear_report* report, int cell,
                                                 int method, double* median);
SNEAR_API snear_status snear_report_diverged(const snear_report* report, int cell, int method,
                                             int* count);
SNEAR_API void snear_report_free(snear_report* report);

#ifdef __cplusplus
}
#endif

#endif /* SNEAR_SNEAR_H */
