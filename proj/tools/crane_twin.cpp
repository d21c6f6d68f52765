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
// crane-twin: operator and researcher command line.
//
// Exit codes: 0 success, 1 usage or rejected request, 2 transport/state
// error, 3 validation verdict FAIL.

#include <csignal>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "cranetwin/cranetwin.h"
#include "json.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitTransport = 2;
constexpr int kExitValidationFailed = 3;

enum class Format { table, csv, raw };

struct Options {
  std::string config_path;
  std::string data_dir;
  std::string gateway;
  std::string format = "table";
  Format fmt = Format::table;
};

struct Failure {
  int exit_code;
  std::string message;
};

std::string env(const char* name) {
  const char* v = std::getenv(name);
  return v ? v : "";
}

std::string take(char* s) {
  std::string out = s ? s : "";
  ct_free(s);
  return out;
}

[[noreturn]] void raise_status(ct_status status) {
  const int code = (status == CT_ERR_DOMAIN || status == CT_ERR_INVALID_ARGUMENT ||
                    status == CT_ERR_NOT_FOUND)
                       ? kExitUsage
                       : kExitTransport;
  throw Failure{code, std::string(ct_status_name(status)) + ": " + ct_last_error()};
}

void check(ct_status status) {
  if (status != CT_OK) raise_status(status);
}

json load_config(const Options& o) {
  const std::string path = o.config_path.empty() ? env("CRANETWIN_CONFIG") : o.config_path;
  char* text = nullptr;
  check(ct_config_load(path.empty() ? nullptr : path.c_str(), &text));
  json config = json::parse(take(text));
  const std::string dir = o.data_dir.empty() ? env("CRANETWIN_DATA_DIR") : o.data_dir;
  if (!dir.empty()) config["data_dir"] = dir;
  return config;
}

std::pair<std::string, int> gateway_address(const Options& o) {
  if (!o.gateway.empty()) {
    const auto colon = o.gateway.rfind(':');
    if (colon == std::string::npos) throw Failure{kExitUsage, "--gateway must be HOST:PORT"};
    try {
      return {o.gateway.substr(0, colon), std::stoi(o.gateway.substr(colon + 1))};
    } catch (const std::exception&) {
      throw Failure{kExitUsage, "--gateway must be HOST:PORT"};
    }
  }
  const json config = load_config(o);
  return {config["gateway"]["host"].get<std::string>(), config["gateway"]["port"].get<int>()};
}

class Gateway {
 public:
  explicit Gateway(const Options& o) {
    const auto [host, port] = gateway_address(o);
    check(ct_client_create(host.c_str(), port, 600.0, &client_));
  }
  ~Gateway() { ct_client_destroy(client_); }

  // Returns (status, body); transport failures throw.
  std::pair<int, json> request(const char* method, const std::string& path,
                               const json& body = nullptr) {
    int status = 0;
    char* out = nullptr;
    const std::string text = body.is_null() ? "" : body.dump();
    check(ct_client_request(client_, method, path.c_str(), text.empty() ? nullptr : text.c_str(),
                            &status, &out));
    const std::string raw = take(out);
    json parsed = json::parse(raw, nullptr, false);
    if (parsed.is_discarded()) parsed = raw;
    return {status, parsed};
  }

  // Like request() but turns API errors into failures.
  json call(const char* method, const std::string& path, const json& body = nullptr) {
    auto [status, reply] = request(method, path, body);
    if (status >= 200 && status < 300) return reply;
    const std::string code = reply.is_object() ? reply.value("code", "error") : "error";
    const std::string message = reply.is_object() ? reply.value("message", "") : reply.dump();
    throw Failure{status == 400 ? kExitUsage : kExitTransport, code + ": " + message};
  }

 private:
  ct_client* client_ = nullptr;
};

std::string fmt_number(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

std::string cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return fmt_number(v.get<double>());
  if (v.is_null()) return "-";
  return v.dump();
}

// Prints rows of an array of objects in the selected format.
void print_rows(const Options& o, const std::vector<std::string>& columns, const json& rows) {
  if (o.fmt == Format::raw) {
    std::cout << rows.dump() << '\n';
    return;
  }
  std::vector<std::vector<std::string>> cells;
  for (const auto& row : rows) {
    std::vector<std::string> line;
    for (const auto& c : columns) line.push_back(row.contains(c) ? cell(row[c]) : "");
    cells.push_back(std::move(line));
  }
  if (o.fmt == Format::csv) {
    for (std::size_t i = 0; i < columns.size(); ++i) std::cout << (i ? "," : "") << columns[i];
    std::cout << '\n';
    for (const auto& line : cells) {
      for (std::size_t i = 0; i < line.size(); ++i) std::cout << (i ? "," : "") << line[i];
      std::cout << '\n';
    }
    return;
  }
  std::vector<std::size_t> width(columns.size());
  for (std::size_t i = 0; i < columns.size(); ++i) width[i] = columns[i].size();
  for (const auto& line : cells)
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  auto print_line = [&](const std::vector<std::string>& line) {
    for (std::size_t i = 0; i + 1 < line.size(); ++i)
      std::cout << std::left << std::setw(static_cast<int>(width[i]) + 2) << line[i];
    if (!line.empty()) std::cout << line.back();
    std::cout << '\n';
  };
  print_line(columns);
  for (const auto& line : cells) print_line(line);
}

void print_object(const Options& o, const json& obj) {
  if (o.fmt == Format::raw) {
    std::cout << obj.dump() << '\n';
    return;
  }
  json rows = json::array();
  for (const auto& [k, v] : obj.items()) rows.push_back({{"field", k}, {"value", v}});
  print_rows(o, {"field", "value"}, rows);
}

int print_report(const Options& o, const json& report) {
  const bool pass = report.value("overall_pass", false);
  if (o.fmt == Format::raw) {
    std::cout << report.dump() << '\n';
  } else {
    if (o.fmt == Format::table)
      std::cout << "run " << report.value("run_id", "") << ": " << (pass ? "PASS" : "FAIL") << '\n';
    print_rows(o, {"signal", "metric", "value", "threshold", "pass"}, report["results"]);
  }
  return pass ? kExitOk : kExitValidationFailed;
}

// ---- commands ---------------------------------------------------------------

int cmd_up(const Options& o, bool headless) {
  json config = load_config(o);
  (void)headless;  // the HMI is a separate component; nothing to suppress

  // Handle termination signals on this thread only.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  ct_stack* stack = nullptr;
  check(ct_stack_create(config.dump().c_str(), &stack));
  const ct_status started = ct_stack_start(
      stack,
      [](const char* line, void*) { std::cout << "ready " << line << std::endl; },
      nullptr);
  if (started != CT_OK) {
    const std::string message = ct_last_error();
    ct_stack_destroy(stack);
    throw Failure{kExitTransport, std::string(ct_status_name(started)) + ": " + message};
  }
  std::cout << "crane-twin up; gateway port " << ct_stack_gateway_port(stack) << ", broker port "
            << ct_stack_broker_port(stack) << std::endl;
  int sig = 0;
  sigwait(&signals, &sig);
  std::cout << "crane-twin: shutting down (signal " << sig << ")" << std::endl;
  ct_stack_destroy(stack);
  return kExitOk;
}

int wait_for_verdict(const Options& o, Gateway& gw, const std::string& run_id, double timeout) {
  const auto deadline =
      std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout);
  while (std::chrono::steady_clock::now() < deadline) {
    auto [status, body] = gw.request("GET", "/api/runs/" + run_id + "/validation");
    if (status == 200) {
      if (o.fmt == Format::table) std::cout << "run_id " << run_id << '\n';
      return print_report(o, body);
    }
    if (status != 404) gw.call("GET", "/api/runs/" + run_id + "/validation");
    auto [run_status, run] = gw.request("GET", "/api/runs/" + run_id);
    if (run_status == 200 && run.value("status", "") == "aborted")
      throw Failure{kExitTransport, "run " + run_id + " was aborted"};
    std::this_thread::sleep_for(std::chrono::milliseconds(200));
  }
  throw Failure{kExitTransport, "timed out waiting for the validation report of " + run_id};
}

int cmd_run(const Options& o, const std::string& path, const json& body, double timeout) {
  Gateway gw(o);
  const json handle = gw.call("POST", path, body);
  return wait_for_verdict(o, gw, handle.at("run_id").get<std::string>(), timeout);
}

int cmd_simple(const Options& o, const char* method, const std::string& path,
               const json& body = nullptr) {
  Gateway gw(o);
  print_object(o, gw.call(method, path, body));
  return kExitOk;
}

int cmd_runs_list(const Options& o) {
  const json config = load_config(o);
  char* out = nullptr;
  check(ct_runs_list(config["data_dir"].get<std::string>().c_str(), &out));
  print_rows(o, {"run_id", "status", "mode", "axis", "target", "started_at", "fault_active"},
             json::parse(take(out)));
  return kExitOk;
}

int cmd_runs_show(const Options& o, const std::string& id) {
  const json config = load_config(o);
  char* out = nullptr;
  check(ct_run_show(config["data_dir"].get<std::string>().c_str(), id.c_str(), &out));
  json run = json::parse(take(out));
  if (o.fmt == Format::raw) {
    std::cout << run.dump() << '\n';
    return kExitOk;
  }
  json report = run.contains("validation") ? run["validation"] : json();
  run.erase("validation");
  print_object(o, run);
  if (!report.is_null()) {
    std::cout << '\n';
    print_report(o, report);
  }
  return kExitOk;
}

int cmd_runs_export(const Options& o, const std::string& id, const std::string& dir) {
  const json config = load_config(o);
  char* out = nullptr;
  check(ct_run_export_csv(config["data_dir"].get<std::string>().c_str(), id.c_str(), dir.c_str(),
                          &out));
  const json result = json::parse(take(out));
  if (o.fmt == Format::raw)
    std::cout << result.dump() << '\n';
  else
    print_rows(o, {"kind", "samples", "path"}, result["files"]);
  return kExitOk;
}

int cmd_validate(const Options& o, const std::string& id) {
  const json config = load_config(o);
  char* out = nullptr;
  check(ct_run_validate(config.dump().c_str(), id.c_str(), &out));
  return print_report(o, json::parse(take(out)));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crane-twin: digital twin of a lab-scale gantry crane"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_path, "Config file (default $CRANETWIN_CONFIG)");
  app.add_option("--data-dir", o.data_dir, "Data directory (default $CRANETWIN_DATA_DIR)");
  app.add_option("--gateway", o.gateway, "Gateway HOST:PORT (default from config)");
  app.add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"table", "csv", "raw"}));

  std::function<int()> action;

  bool headless = false;
  auto* up = app.add_subcommand("up", "Start broker, crane, services and gateway");
  up->add_flag("--headless", headless, "Run without the HMI (the HMI is served separately)");
  up->callback([&] { action = [&] { return cmd_up(o, headless); }; });

  double target_x = 0.0, target_l = 0.0, timeout = 300.0;
  std::string mode = "zv";
  auto* move = app.add_subcommand("move", "Move the cart and wait for the validation verdict");
  move->add_option("--x", target_x, "Target cart position, m")->required();
  move->add_option("--mode", mode, "Trajectory mode")->check(CLI::IsMember({"zv", "trap"}));
  move->add_option("--timeout", timeout, "Seconds to wait for the verdict");
  move->callback([&] {
    action = [&] {
      return cmd_run(o, "/api/move", {{"target_x", target_x}, {"mode", mode}}, timeout);
    };
  });

  auto* hoist = app.add_subcommand("hoist", "Change the rope length and wait for the verdict");
  hoist->add_option("--l", target_l, "Target rope length, m")->required();
  hoist->add_option("--timeout", timeout, "Seconds to wait for the verdict");
  hoist->callback([&] {
    action = [&] { return cmd_run(o, "/api/hoist", {{"target_l", target_l}}, timeout); };
  });

  app.add_subcommand("home", "Drive the cart to its reference position")->callback([&] {
    action = [&] { return cmd_simple(o, "POST", "/api/home"); };
  });
  app.add_subcommand("zero", "Recalibrate the swing encoder")->callback([&] {
    action = [&] { return cmd_simple(o, "POST", "/api/zero"); };
  });
  app.add_subcommand("status", "Show the crane status")->callback([&] {
    action = [&] { return cmd_simple(o, "GET", "/api/status"); };
  });

  std::string magnet_state;
  auto* magnet = app.add_subcommand("magnet", "Switch the electromagnet");
  magnet->add_option("state", magnet_state, "on|off")->required()->check(CLI::IsMember({"on", "off"}));
  magnet->callback([&] {
    action = [&] { return cmd_simple(o, "POST", "/api/magnet", {{"on", magnet_state == "on"}}); };
  });

  double damping_scale = 1.0, rope_offset = 0.0, encoder_bias = 0.0;
  bool clear = false;
  auto* fault = app.add_subcommand("fault", "Inject or clear a plant fault");
  auto* ds = fault->add_option("--damping-scale", damping_scale, "Multiplier on swing damping");
  fault->add_option("--rope-offset", rope_offset, "Rope length offset seen by the plant, m");
  fault->add_option("--encoder-bias", encoder_bias, "Extra encoder bias, rad");
  auto* cl = fault->add_flag("--clear", clear, "Clear the active fault");
  cl->excludes(ds);
  fault->callback([&] {
    action = [&] {
      const json body = clear ? json{{"active", false}}
                              : json{{"damping_scale", damping_scale},
                                     {"rope_length_offset", rope_offset},
                                     {"encoder_bias_extra", encoder_bias},
                                     {"active", true}};
      Gateway gw(o);
      const json reply = gw.call("POST", "/api/faults", body);
      print_object(o, reply["fault"]);
      return kExitOk;
    };
  });

  auto* runs = app.add_subcommand("runs", "Inspect stored runs");
  runs->require_subcommand(1);
  runs->add_subcommand("list", "List runs")->callback([&] {
    action = [&] { return cmd_runs_list(o); };
  });
  std::string run_id, csv_dir;
  auto* show = runs->add_subcommand("show", "Show one run");
  show->add_option("id", run_id, "Run id")->required();
  show->callback([&] { action = [&] { return cmd_runs_show(o, run_id); }; });
  auto* exp = runs->add_subcommand("export", "Export the traces of a run as CSV");
  exp->add_option("id", run_id, "Run id")->required();
  exp->add_option("--csv", csv_dir, "Output directory")->required();
  exp->callback([&] { action = [&] { return cmd_runs_export(o, run_id, csv_dir); }; });

  auto* validate = app.add_subcommand("validate", "Re-run the validation of a stored run");
  validate->add_option("id", run_id, "Run id")->required();
  validate->callback([&] { action = [&] { return cmd_validate(o, run_id); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  o.fmt = o.format == "csv" ? Format::csv : o.format == "raw" ? Format::raw : Format::table;

  try {
    return action ? action() : kExitUsage;
  } catch (const Failure& f) {
    std::cerr << "crane-twin: " << f.message << '\n';
    return f.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "crane-twin: " << e.what() << '\n';
    return kExitTransport;
  }
}
