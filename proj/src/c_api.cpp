#include "retroimg/retroimg.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "retroimg/error.hpp"
#include "retroimg/scenario.hpp"

struct rti_config {
  retroimg::ScenarioConfig config;
};

struct rti_result {
  retroimg::ScenarioConfig config;
  std::vector<retroimg::RetrodictiveResult> results;
};

namespace {

thread_local std::string last_error;

rti_status status_of(retroimg::ErrorCode code) {
  switch (code) {
    case retroimg::ErrorCode::Validation:
      return RTI_ERR_VALIDATION;
    case retroimg::ErrorCode::DarkConditional:
      return RTI_ERR_DARK;
    case retroimg::ErrorCode::Verification:
      return RTI_ERR_VERIFICATION;
    case retroimg::ErrorCode::Io:
      return RTI_ERR_IO;
  }
  return RTI_ERR_INTERNAL;
}

template <class F>
rti_status guarded(F&& body) {
  last_error.clear();
  try {
    return body();
  } catch (const retroimg::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown error";
  }
  return RTI_ERR_INTERNAL;
}

rti_status argument_error(const char* what) {
  last_error = what;
  return RTI_ERR_ARGUMENT;
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* rti_version(void) { return "0.1.0"; }

const char* rti_last_error(void) { return last_error.c_str(); }

rti_status rti_config_parse(const char* text, rti_config** out) {
  if (!text || !out) return argument_error("rti_config_parse: null argument");
  return guarded([&] {
    *out = new rti_config{retroimg::parse_config(text)};
    return RTI_OK;
  });
}

rti_status rti_config_load(const char* path, rti_config** out) {
  if (!path || !out) return argument_error("rti_config_load: null argument");
  return guarded([&] {
    *out = new rti_config{retroimg::load_config(path)};
    return RTI_OK;
  });
}

void rti_config_free(rti_config* config) { delete config; }

rti_status rti_config_serialize(const rti_config* config, char** out) {
  if (!config || !out) return argument_error("rti_config_serialize: null argument");
  return guarded([&] {
    *out = copy_string(retroimg::serialize_config(config->config));
    return RTI_OK;
  });
}

rti_status rti_config_output_dir(const rti_config* config, const char** out) {
  if (!config || !out) return argument_error("rti_config_output_dir: null argument");
  *out = config->config.output_dir.c_str();
  last_error.clear();
  return RTI_OK;
}

rti_status rti_run(const rti_config* config, rti_result** out) {
  if (!config || !out) return argument_error("rti_run: null argument");
  return guarded([&] {
    auto results = retroimg::run_scenario(config->config);
    *out = new rti_result{config->config, std::move(results)};
    return RTI_OK;
  });
}

void rti_result_free(rti_result* result) { delete result; }

size_t rti_result_count(const rti_result* result) { return result ? result->results.size() : 0; }

size_t rti_result_grid_size(const rti_result* result) {
  return result && !result->results.empty() ? result->results.front().distribution.grid.size() : 0;
}

rti_status rti_result_density(const rti_result* result, size_t index, double* x2, double* density,
                              double* x1) {
  if (!result) return argument_error("rti_result_density: null result");
  if (index >= result->results.size()) return argument_error("rti_result_density: index out of range");
  const auto& dist = result->results[index].distribution;
  for (std::size_t i = 0; i < dist.density.size(); ++i) {
    if (x2) x2[i] = dist.grid.x(i);
    if (density) density[i] = dist.density[i];
  }
  if (x1) *x1 = dist.conditioning_position.value_or(0.0);
  last_error.clear();
  return RTI_OK;
}

rti_status rti_result_write(const rti_result* result, const char* out_dir) {
  if (!result) return argument_error("rti_result_write: null result");
  return guarded([&] {
    retroimg::write_outputs(result->config, result->results,
                            out_dir ? std::string(out_dir) : result->config.output_dir);
    return RTI_OK;
  });
}

rti_status rti_verify(int fast, char** report, double* seconds) {
  return guarded([&] {
    const auto r = retroimg::run_verify(fast != 0);
    if (report) *report = copy_string(r.format());
    if (seconds) *seconds = r.seconds;
    if (!r.passed()) {
      last_error = "verification failed";
      return RTI_ERR_VERIFICATION;
    }
    return RTI_OK;
  });
}

size_t rti_scenario_count(void) { return retroimg::builtin_scenarios().size(); }

rti_status rti_scenario_info(size_t index, const char** name, const char** description,
                             const char** config_text) {
  const auto& list = retroimg::builtin_scenarios();
  if (index >= list.size()) return argument_error("rti_scenario_info: index out of range");
  if (name) *name = list[index].name.c_str();
  if (description) *description = list[index].description.c_str();
  if (config_text) *config_text = list[index].config.c_str();
  last_error.clear();
  return RTI_OK;
}

void rti_string_free(char* s) { delete[] s; }

}  // extern "C"
