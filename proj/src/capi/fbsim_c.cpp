#include "fbsim/fbsim.h"

#include <exception>
#include <new>
#include <string>

#include "fbsim/core_transform.hpp"
#include "fbsim/error.hpp"
#include "fbsim/scenarios.hpp"
#include "fbsim/traveling_wave.hpp"

struct fbsim_model {
  fbsim::EpsModel model;
};

struct fbsim_scenario {
  fbsim::ScenarioConfig config;
};

struct fbsim_result {
  fbsim::ScenarioResult result;
};

namespace {

thread_local std::string last_error;

static_assert(static_cast<int>(fbsim::ErrorCode::IoError) + 1 == FBSIM_IO_ERROR);

fbsim_status from_code(fbsim::ErrorCode c) {
  return static_cast<fbsim_status>(static_cast<int>(c) + 1);
}

template <class F>
fbsim_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return FBSIM_OK;
  } catch (const fbsim::Error& e) {
    last_error = e.what();
    return from_code(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return FBSIM_INTERNAL_ERROR;
  } catch (const std::exception& e) {
    last_error = e.what();
    return FBSIM_INTERNAL_ERROR;
  } catch (...) {
    last_error = "unknown exception";
    return FBSIM_INTERNAL_ERROR;
  }
}

fbsim_status null_arg(const char* what) {
  last_error = std::string("null argument: ") + what;
  return FBSIM_NULL_ARGUMENT;
}

template <class F>
fbsim_status model_eval(const fbsim_model* m, double* out, F&& f) {
  if (!m) return null_arg("model");
  if (!out) return null_arg("out");
  return guarded([&] { *out = f(m->model); });
}

}  // namespace

extern "C" {

const char* fbsim_status_string(fbsim_status status) {
  if (status == FBSIM_OK) return "Ok";
  if (status == FBSIM_NULL_ARGUMENT) return "NullArgument";
  if (status == FBSIM_INTERNAL_ERROR) return "InternalError";
  if (status > FBSIM_OK && status < FBSIM_NULL_ARGUMENT) {
    return fbsim::to_string(static_cast<fbsim::ErrorCode>(static_cast<int>(status) - 1));
  }
  return "UnknownStatus";
}

const char* fbsim_last_error(void) { return last_error.c_str(); }

fbsim_status fbsim_model_create(double eps, fbsim_model** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = new fbsim_model{fbsim::EpsModel(eps)}; });
}

void fbsim_model_free(fbsim_model* model) { delete model; }

fbsim_status fbsim_model_u_from_phi(const fbsim_model* m, double phi, double* out) {
  return model_eval(m, out, [&](const fbsim::EpsModel& e) { return e.u_from_phi(phi); });
}

fbsim_status fbsim_model_phi_from_u(const fbsim_model* m, double u, double* out) {
  return model_eval(m, out, [&](const fbsim::EpsModel& e) { return e.phi_from_u(u); });
}

fbsim_status fbsim_model_diffusivity(const fbsim_model* m, double u, double* out) {
  return model_eval(m, out, [&](const fbsim::EpsModel& e) { return e.diffusivity(u); });
}

fbsim_status fbsim_model_reaction(const fbsim_model* m, double u, double* out) {
  return model_eval(m, out, [&](const fbsim::EpsModel& e) { return e.reaction(u); });
}

fbsim_status fbsim_model_a_transform(const fbsim_model* m, double u, double* out) {
  return model_eval(m, out, [&](const fbsim::EpsModel& e) { return e.a_transform(u); });
}

fbsim_status fbsim_model_velocity(const fbsim_model* m, double a_slope, double b_slope, double* out) {
  return model_eval(m, out, [&](const fbsim::EpsModel& e) { return fbsim::velocity(e, a_slope, b_slope); });
}

fbsim_status fbsim_scenario_load(const char* path, fbsim_scenario** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = new fbsim_scenario{fbsim::load_config(path)}; });
}

fbsim_status fbsim_scenario_parse(const char* json_text, fbsim_scenario** out) {
  if (!json_text) return null_arg("json_text");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = new fbsim_scenario{fbsim::parse_config(json_text)}; });
}

void fbsim_scenario_free(fbsim_scenario* scenario) { delete scenario; }

const char* fbsim_scenario_name(const fbsim_scenario* s) { return s ? s->config.name.c_str() : ""; }

const char* fbsim_scenario_kind(const fbsim_scenario* s) { return s ? fbsim::to_string(s->config.kind) : ""; }

const char* fbsim_scenario_subcommand(const fbsim_scenario* s) {
  return s ? fbsim::subcommand(s->config.kind) : "";
}

fbsim_status fbsim_scenario_run(const fbsim_scenario* s, int jobs, fbsim_result** out) {
  if (!s) return null_arg("scenario");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = new fbsim_result{fbsim::run_scenario(s->config, jobs)}; });
}

void fbsim_result_free(fbsim_result* result) { delete result; }

int fbsim_result_passed(const fbsim_result* r) { return r && r->result.passed() ? 1 : 0; }

const char* fbsim_result_summary(const fbsim_result* r) { return r ? r->result.summary_json.c_str() : ""; }

size_t fbsim_result_check_count(const fbsim_result* r) { return r ? r->result.checks.size() : 0; }

fbsim_status fbsim_result_check(const fbsim_result* r, size_t index, const char** name, double* value,
                                double* bound, int* passed) {
  if (!r) return null_arg("result");
  if (index >= r->result.checks.size()) {
    last_error = "check index out of range";
    return FBSIM_OUT_OF_RANGE;
  }
  const auto& c = r->result.checks[index];
  if (name) *name = c.name.c_str();
  if (value) *value = c.value;
  if (bound) *bound = c.bound;
  if (passed) *passed = c.passed ? 1 : 0;
  last_error.clear();
  return FBSIM_OK;
}

fbsim_status fbsim_result_write(const fbsim_result* r, const char* dir) {
  if (!r) return null_arg("result");
  if (!dir) return null_arg("dir");
  return guarded([&] { fbsim::write_outputs(r->result, dir); });
}

}  // extern "C"
