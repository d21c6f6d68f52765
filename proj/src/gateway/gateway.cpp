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
#include "gateway/gateway.hpp"

#include <sys/socket.h>

#include <atomic>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <set>
#include <thread>

#include "bus/topic.hpp"
#include "common/util.hpp"
#include "httplib.h"
#include "io/codec.hpp"

namespace cranetwin::gateway {

using nlohmann::json;

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::domain:
    case ErrorCode::protocol: return 400;
    case ErrorCode::not_found: return 404;
    case ErrorCode::busy:
    case ErrorCode::conflict:
    case ErrorCode::state: return 409;
    default: return 500;
  }
}

std::string_view api_code(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::domain:
    case ErrorCode::protocol: return "bad_request";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::busy:
    case ErrorCode::conflict: return "conflict";
    case ErrorCode::state: return "state_error";
    default: return "internal";
  }
}

namespace {

struct StreamClient {
  std::mutex mutex;
  std::condition_variable cv;
  std::deque<std::string> queue;
  std::size_t dropped = 0;
};

std::string sse(std::string_view event, const json& data) {
  std::string out = "event: ";
  out += event;
  out += "\ndata: ";
  out += data.dump();
  out += "\n\n";
  return out;
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& message) {
  send_json(res, {{"code", api_code(code)}, {"message", message}}, http_status(code));
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded()) fail(ErrorCode::domain, "request body is not valid JSON");
  require(body.is_object(), ErrorCode::domain, "request body must be a JSON object");
  return body;
}

double number_field(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end()) fail(ErrorCode::domain, std::string("missing field '") + key + "'");
  if (!it->is_number()) fail(ErrorCode::domain, std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

double query_number(const httplib::Request& req, const char* key, double fallback) {
  if (!req.has_param(key)) return fallback;
  const std::string text = req.get_param_value(key);
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(key);
    return value;
  } catch (const std::exception&) {
    fail(ErrorCode::domain, std::string("query parameter '") + key + "' must be a number");
  }
}

json run_handle_json(const crane::RunHandle& h) {
  return {{"run_id", h.run_id},
          {"trajectory_id", h.trajectory_id},
          {"started_at", h.started_at},
          {"status", historian::to_string(h.status)}};
}

json status_json(const crane::CraneStatus& s) {
  return {{"state", s.state},
          {"homed", s.homed},
          {"busy", s.busy},
          {"fault_active", s.fault_active},
          {"run_id", s.run_id ? json(*s.run_id) : json(nullptr)}};
}

}  // namespace

struct Gateway::Impl {
  crane::VirtualCrane& crane;
  historian::Historian& historian;
  app::RuntimeConfig& config;
  bus::Client& client;
  GatewayOptions options;

  httplib::Server server;
  int port = 0;
  std::thread thread;
  std::atomic<bool> stopping{false};

  mutable std::mutex clients_mutex;
  std::set<std::shared_ptr<StreamClient>> clients;
  bus::Subscription state_sub;
  bus::Subscription alert_sub;

  Impl(crane::VirtualCrane& c, historian::Historian& h, app::RuntimeConfig& cfg, bus::Client& b,
       GatewayOptions o)
      : crane(c), historian(h), config(cfg), client(b), options(std::move(o)) {}

  void broadcast(const std::string& event) {
    std::lock_guard lock(clients_mutex);
    for (const auto& c : clients) {
      {
        std::lock_guard client_lock(c->mutex);
        if (c->queue.size() >= options.stream_buffer) {
          c->queue.pop_front();
          ++c->dropped;
        }
        c->queue.push_back(event);
      }
      c->cv.notify_one();
    }
  }

  template <typename Handler>
  httplib::Server::Handler guarded(Handler handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const Error& e) {
        send_error(res, e.code(), e.what());
      } catch (const json::exception& e) {
        send_error(res, ErrorCode::domain, e.what());
      } catch (const std::exception& e) {
        send_error(res, ErrorCode::internal, e.what());
      }
    };
  }

  void routes();
  void stream(const httplib::Request& req, httplib::Response& res);
};

void Gateway::Impl::routes() {
  server.Post("/api/move", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    const double target = number_field(body, "target_x");
    const auto mode = trajectory::parse_mode(body.value("mode", "zv_shaped"));
    send_json(res, run_handle_json(crane.move_to(target, mode)));
  }));
  server.Post("/api/hoist", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    send_json(res, run_handle_json(crane.hoist_to(number_field(body, "target_l"))));
  }));
  server.Post("/api/home", guarded([this](const httplib::Request&, httplib::Response& res) {
    crane.home();
    send_json(res, status_json(crane.status()));
  }));
  server.Post("/api/zero", guarded([this](const httplib::Request&, httplib::Response& res) {
    crane.zero();
    send_json(res, status_json(crane.status()));
  }));
  server.Post("/api/magnet", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    auto it = body.find("on");
    require(it != body.end() && it->is_boolean(), ErrorCode::domain,
            "field 'on' must be a boolean");
    crane.set_magnet(it->get<bool>());
    send_json(res, status_json(crane.status()));
  }));
  server.Post("/api/faults", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    crane::FaultSpec fault;
    fault.active = true;  // posting a fault arms it unless told otherwise
    body.get_to(fault);
    crane.inject_fault(fault);
    send_json(res, {{"fault", fault}, {"status", status_json(crane.status())}});
  }));

  server.Get("/api/status", guarded([this](const httplib::Request&, httplib::Response& res) {
    send_json(res, status_json(crane.status()));
  }));
  server.Get("/api/runs", guarded([this](const httplib::Request&, httplib::Response& res) {
    send_json(res, historian.list_runs());
  }));
  server.Get(R"(/api/runs/([^/]+))",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               const std::string id = req.matches[1];
               json body = historian.get_run(id);
               json traces = json::array();
               for (auto kind : {sim::TraceKind::measured, sim::TraceKind::simulated,
                                 sim::TraceKind::envelope_lower, sim::TraceKind::envelope_upper})
                 if (historian.has_trace(id, kind)) traces.push_back(sim::to_string(kind));
               body["traces"] = traces;
               body["validated"] = historian.has_report(id);
               send_json(res, body);
             }));
  server.Get(R"(/api/runs/([^/]+)/trace)",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               const std::string id = req.matches[1];
               const std::string kind_text =
                   req.has_param("kind") ? req.get_param_value("kind") : "measured";
               const sim::TraceKind kind = sim::parse_trace_kind(kind_text);
               const double from =
                   query_number(req, "from", -std::numeric_limits<double>::infinity());
               const double to = query_number(req, "to", std::numeric_limits<double>::infinity());
               historian.get_run(id);  // 404 for unknown runs
               send_json(res, historian.query_trace(id, kind, from, to));
             }));
  server.Get(R"(/api/runs/([^/]+)/validation)",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               const std::string id = req.matches[1];
               historian.get_run(id);
               send_json(res, historian.query_report(id));
             }));

  server.Get("/api/config", guarded([this](const httplib::Request&, httplib::Response& res) {
    send_json(res, config.to_json());
  }));
  server.Put("/api/config", guarded([this](const httplib::Request& req, httplib::Response& res) {
    config.update(parse_body(req));
    send_json(res, config.to_json());
  }));

  server.Get("/api/stream", [this](const httplib::Request& req, httplib::Response& res) {
    stream(req, res);
  });

  if (!options.static_dir.empty()) server.set_mount_point("/", options.static_dir);
}

void Gateway::Impl::stream(const httplib::Request&, httplib::Response& res) {
  auto c = std::make_shared<StreamClient>();
  c->queue.push_back(sse("heartbeat", {{"t", utc_now_iso()}}));
  {
    std::lock_guard lock(clients_mutex);
    clients.insert(c);
  }
  res.set_header("Cache-Control", "no-cache");
  const auto period = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::duration<double>(options.heartbeat_period));
  res.set_chunked_content_provider(
      "text/event-stream",
      [this, c, period](std::size_t, httplib::DataSink& sink) {
        std::string chunk;
        {
          std::unique_lock lock(c->mutex);
          c->cv.wait_for(lock, period, [&] { return stopping || !c->queue.empty(); });
          if (stopping) return false;
          if (c->queue.empty()) {
            chunk = sse("heartbeat", {{"t", utc_now_iso()}});
          } else {
            for (const auto& e : c->queue) chunk += e;
            c->queue.clear();
          }
        }
        return sink.write(chunk.data(), chunk.size());
      },
      [this, c](bool) {
        std::lock_guard lock(clients_mutex);
        clients.erase(c);
      });
}

Gateway::Gateway(crane::VirtualCrane& crane, historian::Historian& historian,
                 app::RuntimeConfig& config, bus::Client& client, GatewayOptions options)
    : impl_(std::make_unique<Impl>(crane, historian, config, client, std::move(options))) {
  Impl& g = *impl_;
  g.server.new_task_queue = [n = g.options.worker_threads] {
    return new httplib::ThreadPool(static_cast<std::size_t>(n));
  };
  // Plain SO_REUSEADDR: a second instance on the same port must fail.
  g.server.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
  g.server.set_keep_alive_timeout(2);
  g.routes();

  if (g.options.port == 0) {
    g.port = g.server.bind_to_any_port(g.options.host);
  } else if (g.server.bind_to_port(g.options.host, g.options.port)) {
    g.port = g.options.port;
  } else {
    g.port = -1;
  }
  if (g.port <= 0)
    fail(ErrorCode::connection, "gateway cannot listen on " + g.options.host + ":" +
                                    std::to_string(g.options.port) +
                                    " (port in use or address unavailable)");

  g.state_sub = client.subscribe(bus::topics::crane_state, [&g](const bus::BusMessage& m) {
    g.broadcast(sse("state", m.payload));
  });
  g.alert_sub = client.subscribe(bus::topics::validation_alert, [&g](const bus::BusMessage& m) {
    g.broadcast(sse("alert", m.payload));
  });
  g.thread = std::thread([&g] { g.server.listen_after_bind(); });
  // stop() is a no-op until the accept loop runs.
  g.server.wait_until_ready();
}

Gateway::~Gateway() { stop(); }

int Gateway::port() const { return impl_->port; }

std::size_t Gateway::stream_clients() const {
  std::lock_guard lock(impl_->clients_mutex);
  return impl_->clients.size();
}

void Gateway::stop() {
  Impl& g = *impl_;
  if (g.stopping.exchange(true)) return;
  g.state_sub.reset();
  g.alert_sub.reset();
  {
    std::lock_guard lock(g.clients_mutex);
    for (const auto& c : g.clients) {
      std::lock_guard client_lock(c->mutex);
      c->cv.notify_all();
    }
  }
  g.server.stop();
  if (g.thread.joinable()) g.thread.join();
}

}  // namespace cranetwin::gateway
