#ifndef FBSIM_H
#define FBSIM_H

#include <stddef.h>

#if defined(_WIN32)
#define FBSIM_API __declspec(dllexport)
#else
#define FBSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fbsim_status {
  FBSIM_OK = 0,
  FBSIM_INVALID_ARGUMENT,
  FBSIM_ITERATION_LIMIT,
  FBSIM_GRID_TOO_SMALL,
  FBSIM_DOMAIN_ERROR,
  FBSIM_NOT_APPLICABLE,
  FBSIM_STEP_UNDERFLOW,
  FBSIM_BAD_ZEROS,
  FBSIM_STEP_REJECTED,
  FBSIM_NEEDS_TWO_TIMES,
  FBSIM_BAD_TEST_FUNCTION,
  FBSIM_NOT_MONOTONE,
  FBSIM_NO_SIGN_CHANGE,
  FBSIM_OUT_OF_RANGE,
  FBSIM_TIME_BOUNDARY,
  FBSIM_TOO_COARSE,
  FBSIM_DEGENERATE_JUMP,
  FBSIM_SCHEME_ERROR,
  FBSIM_CONFIG_ERROR,
  FBSIM_IO_ERROR,
  FBSIM_NULL_ARGUMENT,
  FBSIM_INTERNAL_ERROR
} fbsim_status;

typedef struct fbsim_model fbsim_model;
typedef struct fbsim_scenario fbsim_scenario;
typedef struct fbsim_result fbsim_result;

FBSIM_API const char* fbsim_status_string(fbsim_status status);

/* Message of the last failed call on this thread; empty if none. */
FBSIM_API const char* fbsim_last_error(void);

/* Regularised model */
FBSIM_API fbsim_status fbsim_model_create(double eps, fbsim_model** out);
FBSIM_API void fbsim_model_free(fbsim_model* model);
FBSIM_API fbsim_status fbsim_model_u_from_phi(const fbsim_model* model, double phi, double* out);
FBSIM_API fbsim_status fbsim_model_phi_from_u(const fbsim_model* model, double u, double* out);
FBSIM_API fbsim_status fbsim_model_diffusivity(const fbsim_model* model, double u, double* out);
FBSIM_API fbsim_status fbsim_model_reaction(const fbsim_model* model, double u, double* out);
FBSIM_API fbsim_status fbsim_model_a_transform(const fbsim_model* model, double u, double* out);
FBSIM_API fbsim_status fbsim_model_velocity(const fbsim_model* model, double a_slope, double b_slope, double* out);

/* Scenarios. Loading validates the whole config; nothing is written. */
FBSIM_API fbsim_status fbsim_scenario_load(const char* path, fbsim_scenario** out);
FBSIM_API fbsim_status fbsim_scenario_parse(const char* json_text, fbsim_scenario** out);
FBSIM_API void fbsim_scenario_free(fbsim_scenario* scenario);
FBSIM_API const char* fbsim_scenario_name(const fbsim_scenario* scenario);
FBSIM_API const char* fbsim_scenario_kind(const fbsim_scenario* scenario);
FBSIM_API const char* fbsim_scenario_subcommand(const fbsim_scenario* scenario);

/* Runs with up to `jobs` worker threads. Output is independent of `jobs`. */
FBSIM_API fbsim_status fbsim_scenario_run(const fbsim_scenario* scenario, int jobs, fbsim_result** out);

FBSIM_API void fbsim_result_free(fbsim_result* result);
FBSIM_API int fbsim_result_passed(const fbsim_result* result);
FBSIM_API const char* fbsim_result_summary(const fbsim_result* result);
FBSIM_API size_t fbsim_result_check_count(const fbsim_result* result);
FBSIM_API fbsim_status fbsim_result_check(const fbsim_result* result, size_t index, const char** name, double* value,
                                          double* bound, int* passed);
/* Creates `dir` and writes summary.json, the CSVs and plot.gp. */
FBSIM_API fbsim_status fbsim_result_write(const fbsim_result* result, const char* dir);

#ifdef __cplusplus
}
#endif

#endif
