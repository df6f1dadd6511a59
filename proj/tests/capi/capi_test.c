#include <math.h>
#include <stdio.h>
#include <string.h>

#include "fbsim/fbsim.h"

static int failures = 0;

#define EXPECT(cond)                                            \
  do {                                                          \
    if (!(cond)) {                                              \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                               \
    }                                                           \
  } while (0)

int main(void) {
  fbsim_model* m = NULL;
  double v = 0.0;

  EXPECT(fbsim_model_create(0.0, &m) == FBSIM_INVALID_ARGUMENT);
  EXPECT(m == NULL);
  EXPECT(strlen(fbsim_last_error()) > 0);
  EXPECT(fbsim_model_create(0.01, NULL) == FBSIM_NULL_ARGUMENT);

  EXPECT(fbsim_model_create(0.01, &m) == FBSIM_OK);
  EXPECT(strlen(fbsim_last_error()) == 0);
  EXPECT(fbsim_model_u_from_phi(m, 1.0, &v) == FBSIM_OK);
  EXPECT(fabs(v - 1.0350) < 1e-4);
  EXPECT(fbsim_model_phi_from_u(m, v, &v) == FBSIM_OK);
  EXPECT(fabs(v - 1.0) < 1e-12);
  EXPECT(fbsim_model_diffusivity(m, 0.0, &v) == FBSIM_OK && fabs(v - 0.01) < 1e-15);
  EXPECT(fbsim_model_reaction(m, 0.0, &v) == FBSIM_OK && v == 0.0);
  EXPECT(fbsim_model_a_transform(m, 0.0, &v) == FBSIM_OK && v == 0.0);
  EXPECT(fbsim_model_velocity(m, 1.0, 3.0, &v) == FBSIM_OK && fabs(v + 0.21715) < 1e-4);
  EXPECT(fbsim_model_u_from_phi(NULL, 1.0, &v) == FBSIM_NULL_ARGUMENT);
  fbsim_model_free(m);

  fbsim_model* one = NULL;
  EXPECT(fbsim_model_create(1.0, &one) == FBSIM_OK);
  EXPECT(fbsim_model_velocity(one, 2.0, 1.0, &v) == FBSIM_DOMAIN_ERROR);
  EXPECT(strcmp(fbsim_status_string(FBSIM_DOMAIN_ERROR), "DomainError") == 0);
  fbsim_model_free(one);

  fbsim_scenario* s = NULL;
  EXPECT(fbsim_scenario_parse("{\"name\": \"x\", \"kind\": \"Asymptotics\", \"eps_list\": []}", &s) ==
         FBSIM_CONFIG_ERROR);
  EXPECT(s == NULL);
  EXPECT(fbsim_scenario_load("/nonexistent.json", &s) == FBSIM_CONFIG_ERROR);
  EXPECT(strcmp(fbsim_status_string(FBSIM_CONFIG_ERROR), "ConfigError") == 0);

  EXPECT(fbsim_scenario_parse(
             "{\"name\": \"asym\", \"kind\": \"Asymptotics\", \"eps_list\": [1e-4, 1e-6, 1e-8]}", &s) == FBSIM_OK);
  EXPECT(strcmp(fbsim_scenario_name(s), "asym") == 0);
  EXPECT(strcmp(fbsim_scenario_kind(s), "Asymptotics") == 0);
  EXPECT(strcmp(fbsim_scenario_subcommand(s), "asymptotics") == 0);

  fbsim_result* r = NULL;
  EXPECT(fbsim_scenario_run(s, 2, &r) == FBSIM_OK);
  EXPECT(fbsim_result_passed(r) == 1);
  EXPECT(strstr(fbsim_result_summary(r), "\"passed\": true") != NULL);
  EXPECT(fbsim_result_check_count(r) >= 3);
  const char* name = NULL;
  double value = 0.0, bound = 0.0;
  int passed = 0;
  EXPECT(fbsim_result_check(r, 0, &name, &value, &bound, &passed) == FBSIM_OK);
  EXPECT(name != NULL && passed == 1 && value >= bound);
  EXPECT(fbsim_result_check(r, 1000, &name, &value, &bound, &passed) == FBSIM_OUT_OF_RANGE);
  EXPECT(fbsim_result_write(r, NULL) == FBSIM_NULL_ARGUMENT);
  fbsim_result_free(r);
  fbsim_scenario_free(s);

  if (failures == 0) printf("capi: all checks passed\n");
  return failures == 0 ? 0 : 1;
}
