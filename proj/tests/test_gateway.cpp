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

#include <atomic>
#include <cmath>
#include <memory>
#include <thread>

#include "app/config.hpp"
#include "app/stack.hpp"
#include "doctest.h"
#include "gateway/gateway.hpp"
#include "gateway/http_client.hpp"
#include "io/codec.hpp"
#include "support.hpp"

using namespace cranetwin;
using gateway::HttpClient;
using nlohmann::json;
using namespace std::chrono_literals;

namespace {

app::StackConfig stack_config(const testing::TempDir& dir, double time_scale) {
  app::StackConfig c;
  c.broker.port = 0;
  c.gateway.port = 0;
  c.data_dir = dir.str();
  c.time_scale = time_scale;
  c.heartbeat_period = 0.2;
  return c;
}

struct StackRig {
  explicit StackRig(double time_scale = 0.0)
      : stack(std::make_unique<app::Stack>(stack_config(dir, time_scale))),
        http("127.0.0.1", stack->gateway_port(), 30.0) {}

  json wait_validation(const std::string& run_id) {
    json report;
    REQUIRE(testing::eventually(
        [&] {
          const auto r = http.get("/api/runs/" + run_id + "/validation");
          if (r.status != 200) return false;
          report = r.json();
          return true;
        },
        60s));
    return report;
  }

  std::string move(double x, const char* mode) {
    const auto r = http.post("/api/move", {{"target_x", x}, {"mode", mode}});
    REQUIRE(r.status == 200);
    return r.json()["run_id"].get<std::string>();
  }

  testing::TempDir dir{"ct-gw"};
  std::unique_ptr<app::Stack> stack;
  HttpClient http;
};

// Collects stream events on a background thread until stopped.
struct StreamTap {
  explicit StreamTap(int port) {
    worker = std::thread([this, port] {
      HttpClient client("127.0.0.1", port, 60.0);
      try {
        client.stream("/api/stream", [this](const std::string& event, const std::string& data) {
          std::lock_guard lock(mutex);
          events.emplace_back(event, json::parse(data));
          return !stop;
        });
      } catch (const Error&) {
      }
    });
  }
  ~StreamTap() {
    stop = true;
    worker.join();
  }
  std::size_t count(const std::string& event, const std::string& run_id = {}) {
    std::lock_guard lock(mutex);
    std::size_t n = 0;
    for (const auto& [e, d] : events)
      if (e == event && (run_id.empty() || d.value("run_id", json()) == run_id)) ++n;
    return n;
  }
  std::mutex mutex;
  std::vector<std::pair<std::string, json>> events;
  std::atomic<bool> stop{false};
  std::thread worker;
};

}  // namespace

TEST_CASE("error mapping") {
  CHECK(gateway::http_status(ErrorCode::domain) == 400);
  CHECK(gateway::http_status(ErrorCode::protocol) == 400);
  CHECK(gateway::http_status(ErrorCode::not_found) == 404);
  CHECK(gateway::http_status(ErrorCode::busy) == 409);
  CHECK(gateway::http_status(ErrorCode::conflict) == 409);
  CHECK(gateway::http_status(ErrorCode::state) == 409);
  CHECK(gateway::http_status(ErrorCode::storage) == 500);
  CHECK(gateway::api_code(ErrorCode::busy) == "conflict");
  CHECK(gateway::api_code(ErrorCode::state) == "state_error");
  CHECK(gateway::api_code(ErrorCode::domain) == "bad_request");
  CHECK(gateway::api_code(ErrorCode::not_found) == "not_found");
  CHECK(gateway::api_code(ErrorCode::internal) == "internal");
}

TEST_CASE("command and query surface") {
  StackRig rig;
  auto& http = rig.http;

  CHECK(http.get("/api/runs").json() == json::array());
  const json st = http.get("/api/status").json();
  CHECK(st["homed"] == false);
  CHECK(st["busy"] == false);
  for (const char* k : {"t", "x", "v", "l", "l_dot", "theta", "theta_dot", "wind", "magnet_on"})
    CHECK(st["state"].contains(k));

  auto r = http.post("/api/move", {{"target_x", 0.5}});
  CHECK(r.status == 409);
  CHECK(r.json()["code"] == "state_error");

  r = http.post("/api/home");
  CHECK(r.status == 200);
  CHECK(r.json()["homed"] == true);
  CHECK(http.get("/api/status").json()["homed"] == true);

  r = http.post("/api/move", {{"target_x", -1.0}});
  CHECK(r.status == 400);
  CHECK(r.json()["code"] == "bad_request");
  CHECK(http.post("/api/move", {{"target_x", "far"}}).status == 400);
  CHECK(http.post("/api/move", {{"target_x", 0.3}, {"mode", "optimal"}}).status == 400);
  CHECK(http.request("POST", "/api/move", "{not json").status == 400);
  CHECK(http.post("/api/hoist", {{"target_l", 5.0}}).status == 400);

  for (const char* path : {"/api/runs/run-nope", "/api/runs/run-nope/trace",
                           "/api/runs/run-nope/validation"}) {
    r = http.get(path);
    CHECK(r.status == 404);
    CHECK(r.json()["code"] == "not_found");
  }

  r = http.post("/api/faults", {{"damping_scale", 0.0}});
  CHECK(r.status == 400);
  CHECK(http.get("/api/status").json()["fault_active"] == false);

  r = http.post("/api/magnet", {{"on", true}});
  CHECK(r.status == 200);
  CHECK(r.json()["state"]["magnet_on"] == true);
  CHECK(http.post("/api/magnet", {{"on", "yes"}}).status == 400);
  http.post("/api/magnet", {{"on", false}});

  const std::string id = rig.move(0.4, "zv_shaped");
  const json report = rig.wait_validation(id);
  CHECK(report["run_id"] == id);
  CHECK(report["results"].size() == 9);
  CHECK(report["overall_pass"] == true);

  const json run = http.get("/api/runs/" + id).json();
  CHECK(run["status"] == "completed");
  CHECK(run["validated"] == true);
  CHECK(run["traces"].size() == 4);
  CHECK(http.get("/api/runs").json().size() == 1);

  SUBCASE("traces and envelope via the API") {
    const json measured = http.get("/api/runs/" + id + "/trace?kind=measured").json();
    const json lo = http.get("/api/runs/" + id + "/trace?kind=envelope_lower").json();
    const json hi = http.get("/api/runs/" + id + "/trace?kind=envelope_upper").json();
    REQUIRE(!hi["samples"].empty());
    REQUIRE(lo["samples"].size() == hi["samples"].size());
    for (std::size_t i = 0; i < lo["samples"].size(); ++i)
      for (const char* k : {"x", "theta", "l"})
        REQUIRE(lo["samples"][i][k].get<double>() <= hi["samples"][i][k].get<double>());
    const double t0 = measured["samples"][0]["t"].get<double>();
    const std::string q = "/api/runs/" + id + "/trace?kind=measured&from=" +
                          std::to_string(t0 + 0.5) + "&to=" + std::to_string(t0 + 1.0);
    const json window = http.get(q).json();
    CHECK(window["samples"].size() >= 50);
    CHECK(window["samples"].size() <= 51);
    for (const auto& s : window["samples"]) {
      CHECK(s["t"].get<double>() >= t0 + 0.5 - 1e-6);
      CHECK(s["t"].get<double>() <= t0 + 1.0 + 1e-6);
    }
    CHECK(http.get("/api/runs/" + id + "/trace?kind=raw").status == 404);
    CHECK(http.get("/api/runs/" + id + "/trace?kind=measured&from=abc").status == 400);
  }
  SUBCASE("zero while swinging is refused") {
    rig.wait_validation(rig.move(0.0, "trapezoid"));
    r = http.post("/api/zero");
    CHECK(r.status == 409);
    CHECK(r.json()["code"] == "state_error");
  }
  SUBCASE("faults arm and clear") {
    r = http.post("/api/faults", {{"damping_scale", 1.5}});
    CHECK(r.status == 200);
    CHECK(r.json()["status"]["fault_active"] == true);
    CHECK(r.json()["fault"]["active"] == true);
    r = http.post("/api/faults", {{"damping_scale", 1.0}, {"active", false}});
    CHECK(r.json()["status"]["fault_active"] == false);
  }
}

TEST_CASE("runtime configuration") {
  StackRig rig;
  auto& http = rig.http;
  const json before = http.get("/api/config").json();
  CHECK(before["thresholds"].size() == 9);

  auto r = http.put("/api/config", {{"logger", {{"writeout_decimation", 0}}}});
  CHECK(r.status == 400);
  CHECK(r.json()["code"] == "bad_request");
  CHECK(http.get("/api/config").json() == before);

  CHECK(http.put("/api/config", {{"seed", 7}}).status == 400);
  CHECK(http.put("/api/config", {{"dtw_band", -3}}).status == 400);
  CHECK(http.request("PUT", "/api/config", "[1,2").status == 400);

  r = http.put("/api/config", {{"logger", {{"writeout_decimation", 5}}}, {"dtw_band", 12}});
  REQUIRE(r.status == 200);
  CHECK(r.json()["logger"]["writeout_decimation"] == 5);
  CHECK(http.get("/api/config").json()["dtw_band"] == 12);
  // The same document sent back unchanged is accepted.
  CHECK(http.put("/api/config", http.get("/api/config").json()).status == 200);

  // Logger decimation applies to the next run's measured stream.
  http.post("/api/home");
  const std::string id = rig.move(0.2, "zv_shaped");
  rig.wait_validation(id);
  const auto& hist = rig.stack->historian();
  CHECK(hist.stored_count(id) == (hist.offered_count(id) + 4) / 5);
}

TEST_CASE("move conflict while a run is active") {
  StackRig rig(2.0);
  auto& http = rig.http;
  http.post("/api/home");
  const std::string id = rig.move(0.6, "trapezoid");
  auto r = http.post("/api/move", {{"target_x", 0.1}});
  CHECK(r.status == 409);
  CHECK(r.json()["code"] == "conflict");
  CHECK(http.post("/api/home").status == 409);
  CHECK(http.get("/api/status").json()["busy"] == true);
  CHECK(http.get("/api/status").json()["run_id"] == id);
  rig.wait_validation(id);
  CHECK(http.get("/api/runs").json().size() == 1);
}

TEST_CASE("stream: heartbeats when idle, states at the sample rate, one alert per fault run") {
  StackRig rig(4.0);
  auto& http = rig.http;
  StreamTap tap(rig.stack->gateway_port());
  REQUIRE(testing::eventually([&] { return tap.count("heartbeat") >= 3; }));
  CHECK(tap.count("state") == 0);
  CHECK(tap.count("alert") == 0);

  http.post("/api/home");
  const std::string id = rig.move(0.5, "zv_shaped");
  rig.wait_validation(id);
  const json measured = http.get("/api/runs/" + id + "/trace").json();
  const auto& s = measured["samples"];
  const double duration = s.back()["t"].get<double>() - s.front()["t"].get<double>();
  const double expected = duration / 0.01 + 1.0;
  REQUIRE(testing::eventually([&] { return tap.count("state", id) >= expected - 1; }));
  std::this_thread::sleep_for(300ms);
  MESSAGE("state events " << tap.count("state", id) << " expected " << expected);
  CHECK(std::abs(static_cast<double>(tap.count("state", id)) - expected) <= 1.0);
  CHECK(tap.count("alert") == 0);

  http.post("/api/faults", {{"damping_scale", 1.5}});
  const std::string fid = rig.move(0.0, "trapezoid");
  const json report = rig.wait_validation(fid);
  CHECK(report["overall_pass"] == false);
  REQUIRE(testing::eventually([&] { return tap.count("alert", fid) == 1; }));
  std::this_thread::sleep_for(500ms);
  CHECK(tap.count("alert") == 1);
}

TEST_CASE("second gateway on a taken port") {
  StackRig rig;
  testing::TempDir other("ct-gw2");
  app::StackConfig c = stack_config(other, 0.0);
  c.gateway.port = rig.stack->gateway_port();
  try {
    app::Stack second(c);
    FAIL("second stack started");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::connection);
    CHECK(std::string(e.what()).find(std::to_string(c.gateway.port)) != std::string::npos);
  }
  c.gateway.port = 0;
  c.broker.port = rig.stack->broker_port();
  CHECK(testing::code_of([&] { app::Stack third(c); }) == ErrorCode::connection);
}
