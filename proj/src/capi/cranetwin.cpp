// Copyright 2026 The crane-twin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "cranetwin/cranetwin.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <string>

#include "app/config.hpp"
#include "app/stack.hpp"
#include "common/error.hpp"
#include "gateway/http_client.hpp"
#include "historian/historian.hpp"
#include "io/codec.hpp"
#include "io/csv.hpp"
#include "trajectory/service.hpp"
#include "validation/validator.hpp"

using nlohmann::json;
namespace ct = cranetwin;

struct ct_stack {
  ct::app::StackConfig config;
  std::unique_ptr<ct::app::Stack> stack;
};

struct ct_client {
  std::unique_ptr<ct::gateway::HttpClient> http;
};

namespace {

thread_local std::string last_error;

ct_status to_status(ct::ErrorCode code) {
  switch (code) {
    case ct::ErrorCode::domain: return CT_ERR_DOMAIN;
    case ct::ErrorCode::singularity: return CT_ERR_SINGULARITY;
    case ct::ErrorCode::numerical: return CT_ERR_NUMERICAL;
    case ct::ErrorCode::state: return CT_ERR_STATE;
    case ct::ErrorCode::busy: return CT_ERR_BUSY;
    case ct::ErrorCode::not_found: return CT_ERR_NOT_FOUND;
    case ct::ErrorCode::conflict: return CT_ERR_CONFLICT;
    case ct::ErrorCode::protocol: return CT_ERR_PROTOCOL;
    case ct::ErrorCode::connection: return CT_ERR_CONNECTION;
    case ct::ErrorCode::storage: return CT_ERR_STORAGE;
    case ct::ErrorCode::timeout: return CT_ERR_TIMEOUT;
    case ct::ErrorCode::internal: return CT_ERR_INTERNAL;
  }
  return CT_ERR_INTERNAL;
}

template <typename F>
ct_status guard(F&& f) {
  try {
    last_error.clear();
    f();
    return CT_OK;
  } catch (const ct::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const json::exception& e) {
    last_error = e.what();
    return CT_ERR_DOMAIN;
  } catch (const std::filesystem::filesystem_error& e) {
    last_error = e.what();
    return CT_ERR_STORAGE;
  } catch (const std::exception& e) {
    last_error = e.what();
    return CT_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return CT_ERR_INTERNAL;
  }
}

ct_status guard_args(std::initializer_list<std::pair<const void*, const char*>> args) {
  for (const auto& [p, name] : args)
    if (!p) {
      last_error = std::string(name) + " must not be NULL";
      return CT_ERR_INVALID_ARGUMENT;
    }
  return CT_OK;
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json parse(const char* text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) ct::fail(ct::ErrorCode::domain, std::string(what) + " is not valid JSON");
  return j;
}

ct::app::StackConfig config_from(const char* config_json) {
  ct::app::StackConfig config;
  if (config_json && *config_json) parse(config_json, "config").get_to(config);
  return config;
}

}  // namespace

extern "C" {

const char* ct_version(void) { return "0.1.0"; }

const char* ct_status_name(ct_status status) {
  switch (status) {
    case CT_OK: return "ok";
    case CT_ERR_INVALID_ARGUMENT: return "invalid_argument";
    default: break;
  }
  if (status > CT_OK && status < CT_ERR_INVALID_ARGUMENT)
    return ct::to_string(static_cast<ct::ErrorCode>(status - 1)).data();
  return "unknown";
}

const char* ct_last_error(void) { return last_error.c_str(); }

void ct_free(void* ptr) { std::free(ptr); }

ct_status ct_config_load(const char* path, char** out_json) {
  if (auto s = guard_args({{out_json, "out_json"}})) return s;
  return guard([&] {
    const json j = ct::app::load_config(path ? std::filesystem::path(path) : std::filesystem::path());
    *out_json = dup(j.dump(2));
  });
}

ct_status ct_stack_create(const char* config_json, ct_stack** out) {
  if (auto s = guard_args({{out, "out"}})) return s;
  return guard([&] {
    auto stack = std::make_unique<ct_stack>();
    stack->config = config_from(config_json);
    stack->config.validate();
    *out = stack.release();
  });
}

ct_status ct_stack_start(ct_stack* stack, ct_ready_fn on_ready, void* user) {
  if (auto s = guard_args({{stack, "stack"}})) return s;
  return guard([&] {
    if (stack->stack) ct::fail(ct::ErrorCode::state, "stack already started");
    stack->stack = std::make_unique<ct::app::Stack>(stack->config, [&](const std::string& line) {
      if (on_ready) on_ready(line.c_str(), user);
    });
  });
}

int ct_stack_gateway_port(const ct_stack* stack) {
  return stack && stack->stack ? stack->stack->gateway_port() : -1;
}

int ct_stack_broker_port(const ct_stack* stack) {
  return stack && stack->stack ? stack->stack->broker_port() : -1;
}

ct_status ct_stack_stop(ct_stack* stack) {
  if (auto s = guard_args({{stack, "stack"}})) return s;
  return guard([&] { stack->stack.reset(); });
}

void ct_stack_destroy(ct_stack* stack) {
  if (!stack) return;
  try {
    stack->stack.reset();
  } catch (...) {
  }
  delete stack;
}

ct_status ct_client_create(const char* host, int port, double timeout_seconds, ct_client** out) {
  if (auto s = guard_args({{host, "host"}, {out, "out"}})) return s;
  return guard([&] {
    ct::require(port > 0 && port <= 65535, ct::ErrorCode::domain, "port must be in [1, 65535]");
    ct::require(timeout_seconds > 0.0, ct::ErrorCode::domain, "timeout must be > 0");
    auto client = std::make_unique<ct_client>();
    client->http = std::make_unique<ct::gateway::HttpClient>(host, port, timeout_seconds);
    *out = client.release();
  });
}

ct_status ct_client_request(ct_client* client, const char* method, const char* path,
                            const char* body, int* http_status, char** out_body) {
  if (auto s = guard_args({{client, "client"},
                           {method, "method"},
                           {path, "path"},
                           {http_status, "http_status"},
                           {out_body, "out_body"}}))
    return s;
  return guard([&] {
    const auto response = client->http->request(method, path, body ? body : "");
    *http_status = response.status;
    *out_body = dup(response.body);
  });
}

void ct_client_destroy(ct_client* client) { delete client; }

ct_status ct_runs_list(const char* data_dir, char** out_json) {
  if (auto s = guard_args({{data_dir, "data_dir"}, {out_json, "out_json"}})) return s;
  return guard([&] {
    json runs = json::array();
    if (std::filesystem::exists(data_dir)) {
      ct::historian::Historian h(data_dir);
      runs = h.list_runs();
    }
    *out_json = dup(runs.dump());
  });
}

ct_status ct_run_show(const char* data_dir, const char* run_id, char** out_json) {
  if (auto s = guard_args({{data_dir, "data_dir"}, {run_id, "run_id"}, {out_json, "out_json"}}))
    return s;
  return guard([&] {
    ct::historian::Historian h(data_dir);
    json out = h.get_run(run_id);
    json traces = json::object();
    for (auto kind : {ct::sim::TraceKind::measured, ct::sim::TraceKind::simulated,
                      ct::sim::TraceKind::envelope_lower, ct::sim::TraceKind::envelope_upper})
      if (h.has_trace(run_id, kind))
        traces[std::string(ct::sim::to_string(kind))] = h.query_trace(run_id, kind).samples.size();
    out["traces"] = traces;
    if (h.has_report(run_id)) out["validation"] = h.query_report(run_id);
    *out_json = dup(out.dump());
  });
}

ct_status ct_run_trace(const char* data_dir, const char* run_id, const char* kind,
                       char** out_json) {
  if (auto s = guard_args(
          {{data_dir, "data_dir"}, {run_id, "run_id"}, {kind, "kind"}, {out_json, "out_json"}}))
    return s;
  return guard([&] {
    ct::historian::Historian h(data_dir);
    h.get_run(run_id);
    const json trace = h.query_trace(run_id, ct::sim::parse_trace_kind(kind));
    *out_json = dup(trace.dump());
  });
}

ct_status ct_run_export_csv(const char* data_dir, const char* run_id, const char* out_dir,
                            char** out_json) {
  if (auto s = guard_args({{data_dir, "data_dir"},
                           {run_id, "run_id"},
                           {out_dir, "out_dir"},
                           {out_json, "out_json"}}))
    return s;
  return guard([&] {
    ct::historian::Historian h(data_dir);
    h.get_run(run_id);
    std::filesystem::create_directories(out_dir);
    json files = json::array();
    for (auto kind : {ct::sim::TraceKind::measured, ct::sim::TraceKind::simulated,
                      ct::sim::TraceKind::envelope_lower, ct::sim::TraceKind::envelope_upper}) {
      if (!h.has_trace(run_id, kind)) continue;
      const auto trace = h.query_trace(run_id, kind);
      const auto path = std::filesystem::path(out_dir) / (std::string(ct::sim::to_string(kind)) + ".csv");
      ct::io::write_csv(path, trace.samples);
      files.push_back({{"kind", ct::sim::to_string(kind)},
                       {"path", path.string()},
                       {"samples", trace.samples.size()}});
    }
    *out_json = dup(json{{"run_id", run_id}, {"files", files}}.dump());
  });
}

ct_status ct_run_validate(const char* config_json, const char* run_id, char** out_json) {
  if (auto s = guard_args({{run_id, "run_id"}, {out_json, "out_json"}})) return s;
  return guard([&] {
    const ct::app::StackConfig base = config_from(config_json);
    ct::historian::Historian h(base.data_dir);
    h.get_run(run_id);
    ct::app::RuntimeConfig rc(base, nullptr);
    rc.load_overrides();
    const auto settings = rc.snapshot().validation_settings();
    ct::require(!settings.thresholds.empty(), ct::ErrorCode::state,
                "no thresholds configured; start the stack once to calibrate them");
    const json report = ct::validation::validate_run(h, run_id, settings);
    *out_json = dup(report.dump());
  });
}

ct_status ct_plan_trajectory(const char* request_json, const char* params_json, char** out_json) {
  if (auto s = guard_args({{request_json, "request_json"}, {out_json, "out_json"}})) return s;
  return guard([&] {
    ct::model::CraneParameters params;
    if (params_json && *params_json) parse(params_json, "params").get_to(params);
    params.validate();
    const json traj = ct::trajectory::plan_request(parse(request_json, "request"), params);
    *out_json = dup(traj.dump());
  });
}

}  // extern "C"
