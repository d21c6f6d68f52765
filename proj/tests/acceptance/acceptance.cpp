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


// Acceptance suite: one PASS/FAIL line per primary criterion. Exits non-zero
// when any criterion fails. Everything runs headless; no HMI is involved.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "app/stack.hpp"
#include "bus/broker.hpp"
#include "bus/tcp.hpp"
#include "bus/topic.hpp"
#include "gateway/http_client.hpp"
#include "historian/historian.hpp"
#include "model/crane_model.hpp"
#include "oracles.hpp"
#include "sim/simulation.hpp"
#include "support.hpp"
#include "trajectory/trajectory.hpp"
#include "validation/metrics.hpp"

using namespace cranetwin;
using namespace std::chrono_literals;
using nlohmann::json;

namespace {

// A failed expectation aborts the criterion with a message.
struct Unmet {
  std::string what;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Unmet{what};
}

template <typename T>
std::string str(const T& v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

// ---- anti-swing ----------------------------------------------------------

double residual_swing(const trajectory::Trajectory& traj, double l) {
  model::CraneParameters p;
  p.swing_damping = 0.0;
  p.wind_gain = 0.0;
  model::CraneState s;
  s.x = traj.start_pos();
  s.l = l;
  const double dt = traj.dt;
  for (std::size_t k = 0; k + 1 < traj.waypoints.size(); ++k)
    s = model::step_rk4(s, {.a_cart = traj.waypoints[k].acc}, dt, p);
  double worst = std::abs(s.theta);
  for (int k = 0; k < 5000; ++k) {
    s = model::step_rk4(s, {}, dt, p);
    worst = std::max(worst, std::abs(s.theta));
  }
  return worst;
}

std::string anti_swing() {
  model::CraneParameters p;
  p.swing_damping = 0.0;
  const double l = 0.5;
  const auto zv = trajectory::plan_zv_shaped(0.0, 0.5, p.cart_v_max, p.cart_a_max, l, 0.0, 1e-3, p);
  const auto base = trajectory::plan_trapezoid(0.0, 0.5, p.cart_v_max, p.cart_a_max, 1e-3);
  const double r_zv = residual_swing(zv, l);
  const double r_base = residual_swing(base, l);
  expect(r_zv < 1e-3, "zv residual " + str(r_zv) + " rad >= 1e-3");
  expect(r_zv * 10.0 <= r_base, "zv residual " + str(r_zv) + " not 10x below " + str(r_base));
  return "zv residual " + str(r_zv) + " rad, trapezoid " + str(r_base) + " rad (" +
         str(r_base / r_zv) + "x)";
}

// ---- physics fidelity ----------------------------------------------------

double free_period(double l, const model::CraneParameters& p) {
  model::CraneState s;
  s.l = l;
  s.theta = 0.05;
  std::vector<double> crossings;
  const double dt = 1e-3;
  while (crossings.size() < 6) {
    const model::CraneState next = model::step_rk4(s, {}, dt, p);
    if (s.theta > 0.0 && next.theta <= 0.0)
      crossings.push_back(s.t + dt * s.theta / (s.theta - next.theta));
    s = next;
  }
  return (crossings.back() - crossings.front()) / double(crossings.size() - 1);
}

model::CraneState swing_for(double dt, const model::CraneParameters& p) {
  model::CraneState s;
  s.l = 0.5;
  s.theta = 0.4;
  s.theta_dot = -0.3;
  const auto n = static_cast<long>(std::llround(2.0 / dt));
  for (long k = 0; k < n; ++k) s = model::step_rk4(s, {}, dt, p);
  return s;
}

std::string physics_fidelity() {
  model::CraneParameters undamped;
  undamped.swing_damping = 0.0;
  undamped.wind_gain = 0.0;
  double worst_period = 0.0;
  for (double l : {0.3, 0.5, 0.8}) {
    const double oracle = 2.0 * M_PI * std::sqrt(l / undamped.gravity);
    const double err = std::abs(free_period(l, undamped) - oracle) / oracle;
    expect(err < 0.01, "period error " + str(err) + " at l = " + str(l));
    worst_period = std::max(worst_period, err);
  }

  model::CraneParameters damped;
  damped.wind_gain = 0.0;
  expect(damped.swing_damping > 0.0, "nominal damping must be positive");
  model::CraneState s;
  s.l = 0.5;
  s.theta = 0.3;
  double previous = model::swing_energy(s, damped.gravity);
  for (int k = 0; k < 10000; ++k) {
    s = model::step_rk4(s, {}, 1e-3, damped);
    const double e = model::swing_energy(s, damped.gravity);
    expect(e <= previous + 1e-12, "energy increased at step " + str(k));
    previous = e;
  }

  const auto ref = swing_for(1e-5, undamped);
  const auto coarse = swing_for(1e-3, undamped);
  const auto fine = swing_for(5e-4, undamped);
  const double e1 = std::hypot(coarse.theta - ref.theta, coarse.theta_dot - ref.theta_dot);
  const double e2 = std::hypot(fine.theta - ref.theta, fine.theta_dot - ref.theta_dot);
  const double order = std::log2(e1 / e2);
  expect(order >= 3.8, "observed order " + str(order));
  return "worst period error " + str(worst_period * 100) + "%, energy non-increasing, RK4 order " +
         str(order);
}

// ---- metric correctness ----------------------------------------------------

std::string metric_correctness() {
  std::mt19937_64 rng(2026);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> len(1, 40);
  auto seq = [&](std::size_t n) {
    testing::Seq s(n);
    for (auto& v : s) v = nd(rng);
    return s;
  };
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = len(rng);
    const auto a = seq(n), b = seq(n);
    const std::size_t band = n;
    for (auto [name, f] : std::initializer_list<
             std::pair<const char*, std::function<double(const testing::Seq&, const testing::Seq&)>>>{
             {"rmse", [](const auto& x, const auto& y) { return validation::rmse(x, y); }},
             {"max_dev", [](const auto& x, const auto& y) { return validation::max_dev(x, y); }},
             {"dtw", [band](const auto& x, const auto& y) { return validation::dtw(x, y, band); }}}) {
      const double ab = f(a, b);
      expect(f(a, a) == 0.0, std::string(name) + " identity");
      expect(ab == f(b, a), std::string(name) + " symmetry");
      expect(ab >= 0.0, std::string(name) + " non-negativity");
    }
  }
  std::uniform_int_distribution<std::size_t> small(1, 6);
  for (int i = 0; i < 100; ++i) {
    const auto a = seq(small(rng)), b = seq(small(rng));
    const std::size_t band = std::max(a.size(), b.size());
    const double got = validation::dtw(a, b, band);
    const double want = testing::dtw_oracle(a, b, band);
    expect(got == want, "dtw " + str(got) + " != oracle " + str(want) + " in case " + str(i));
  }
  return "identity/symmetry/non-negativity on 500 pairs x 3 metrics; dtw == oracle on 100 cases";
}

// ---- envelope --------------------------------------------------------------

using Getter = double (*)(const model::CraneState&);
constexpr Getter kSignals[] = {[](const model::CraneState& s) { return s.x; },
                               [](const model::CraneState& s) { return s.theta; },
                               [](const model::CraneState& s) { return s.l; }};

std::string envelope_properties() {
  const model::CraneParameters p;
  const auto traj = trajectory::plan_trapezoid(0.0, 0.5, p.cart_v_max, p.cart_a_max, 1e-3);
  model::CraneState s0;
  s0.l = 0.5;
  s0.wind = 0.6;
  const sim::PlaybackOptions opt{10, 1.0};
  const sim::Trace nominal = sim::simulate(traj, p, s0, 1e-3, opt);
  sim::EnvelopeConfig cfg;
  const auto [lo, hi] = sim::confidence_envelope(traj, p, s0, 1e-3, cfg, opt);
  expect(lo.samples.size() == nominal.samples.size() && hi.samples.size() == nominal.samples.size(),
         "envelope length differs from the nominal trace");
  double width = 0.0;
  for (std::size_t i = 0; i < nominal.samples.size(); ++i)
    for (Getter g : kSignals) {
      expect(g(lo.samples[i]) <= g(hi.samples[i]), "lower > upper at sample " + str(i));
      expect(g(lo.samples[i]) <= g(nominal.samples[i]) && g(nominal.samples[i]) <= g(hi.samples[i]),
             "nominal outside the envelope at sample " + str(i));
      width = std::max(width, g(hi.samples[i]) - g(lo.samples[i]));
    }
  expect(width > 0.0, "envelope has zero width for p > 0");

  sim::EnvelopeConfig zero = cfg;
  zero.perturbation = 0.0;
  const auto [zl, zh] = sim::confidence_envelope(traj, p, s0, 1e-3, zero, opt);
  for (std::size_t i = 0; i < nominal.samples.size(); ++i)
    for (Getter g : kSignals)
      expect(g(zl.samples[i]) == g(nominal.samples[i]) && g(zh.samples[i]) == g(nominal.samples[i]),
             "p = 0 envelope differs from nominal at sample " + str(i));

  const auto [l2, h2] = sim::confidence_envelope(traj, p, s0, 1e-3, cfg, opt);
  for (std::size_t i = 0; i < nominal.samples.size(); ++i)
    expect(l2.samples[i] == lo.samples[i] && h2.samples[i] == hi.samples[i],
           "envelope not reproducible at sample " + str(i));
  return str(nominal.samples.size()) + " samples x 3 signals, ensemble " +
         str(cfg.ensemble_size) + ", p = " + str(cfg.perturbation);
}

// ---- bus contract ----------------------------------------------------------

std::string bus_contract() {
  std::size_t agree = 0;
  for (const auto& r : testing::kRules) {
    expect(bus::match(r.pattern, r.topic) == r.expected,
           std::string("match(") + r.pattern + ", " + r.topic + ") != " +
               (r.expected ? "true" : "false"));
    ++agree;
  }

  bus::Broker broker;
  bus::TcpServer server(broker, "127.0.0.1", 0);
  bus::TcpClient sub("127.0.0.1", server.port());
  bus::TcpClient pub("127.0.0.1", server.port());
  std::mutex mutex;
  std::vector<int> got;
  auto s = sub.subscribe("soak/#", [&](const bus::BusMessage& m) {
    std::lock_guard lock(mutex);
    got.push_back(m.payload.at("i").get<int>());
  });
  // The subscription is live once a probe round-trips.
  std::atomic<bool> probed{false};
  auto p = sub.subscribe("probe", [&](const bus::BusMessage&) { probed = true; });
  expect(testing::eventually([&] {
           pub.publish("probe", json::object());
           return probed.load();
         }),
         "subscription never became live");
  for (int i = 0; i < 1000; ++i) pub.publish("soak/n", json{{"i", i}});
  const bool complete = testing::eventually([&] {
    std::lock_guard lock(mutex);
    return got.size() >= 1000;
  });
  std::this_thread::sleep_for(100ms);
  std::lock_guard lock(mutex);
  expect(complete && got.size() == 1000, "received " + str(got.size()) + " of 1000");
  for (int i = 0; i < 1000; ++i) expect(got[i] == i, "message " + str(i) + " out of order");
  return "1000/1000 in order over TCP; " + str(agree) + "/30 wildcard rules agree";
}

// ---- historian -------------------------------------------------------------

bool bit_equal(const model::CraneState& a, const model::CraneState& b) {
  const double fa[] = {a.t, a.x, a.v, a.l, a.l_dot, a.theta, a.theta_dot, a.wind};
  const double fb[] = {b.t, b.x, b.v, b.l, b.l_dot, b.theta, b.theta_dot, b.wind};
  return std::memcmp(fa, fb, sizeof fa) == 0 && a.magnet_on == b.magnet_on;
}

historian::RunRecord record(const std::string& id) {
  historian::RunRecord r;
  r.run_id = id;
  r.trajectory_id = "traj-" + id;
  r.mode = "zv_shaped";
  r.axis = "cart";
  r.target = 0.5;
  r.started_at = "2026-01-01T00:00:00.000Z";
  return r;
}

std::string historian_roundtrip() {
  testing::TempDir dir("ct-acc-hist");
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> e(-12, 3);
  auto v = [&] { return u(rng) * std::pow(10.0, e(rng)); };
  std::vector<model::CraneState> written;
  {
    historian::Historian h(dir.path());
    h.create_run(record("run-rt"));
    h.open_measured("run-rt", 0.01);
    for (int i = 0; i < 2000; ++i) {
      model::CraneState s{.t = 0.01 * i, .x = v(), .v = v(), .l = v(), .l_dot = v(),
                          .theta = v(), .theta_dot = v(), .wind = v(), .magnet_on = (i % 3) == 0};
      written.push_back(s);
      h.append_state("run-rt", s);
    }
    h.flush();
    h.complete_run("run-rt", historian::RunStatus::completed);
  }
  historian::Historian reopened(dir.path());
  const auto t = reopened.query_trace("run-rt", sim::TraceKind::measured);
  expect(t.samples.size() == written.size(), "restart lost samples");
  for (std::size_t i = 0; i < written.size(); ++i)
    expect(bit_equal(t.samples[i], written[i]), "sample " + str(i) + " not bit-identical");

  for (std::size_t n : {1u, 7u, 10u})
    for (std::size_t count : {0u, 1u, 99u, 100u, 101u, 1000u}) {
      testing::TempDir d("ct-acc-dec");
      historian::Historian h(d.path(), historian::LoggerConfig{n, 1.0});
      h.create_run(record("run-d"));
      h.open_measured("run-d", 0.01);
      for (std::size_t i = 0; i < count; ++i)
        h.append_state("run-d", model::CraneState{.t = 0.01 * static_cast<double>(i)});
      h.complete_run("run-d", historian::RunStatus::completed);
      const std::size_t expected = (count + n - 1) / n;
      const std::size_t stored =
          count ? h.query_trace("run-d", sim::TraceKind::measured).samples.size() : h.stored_count("run-d");
      expect(stored == expected, "N = " + str(n) + ", count = " + str(count) + ": stored " +
                                     str(stored) + ", expected " + str(expected));
    }
  return "2000 samples bit-exact across restart; ceil(count/N) for N in {1, 7, 10}";
}

// ---- stack-backed criteria -------------------------------------------------

struct LiveStack {
  explicit LiveStack(double time_scale) {
    app::StackConfig c;
    c.broker.port = 0;
    c.gateway.port = 0;
    c.data_dir = dir.str();
    c.time_scale = time_scale;
    c.heartbeat_period = 0.5;
    stack = std::make_unique<app::Stack>(c);
    http = std::make_unique<gateway::HttpClient>("127.0.0.1", stack->gateway_port(), 30.0);
  }

  std::string move(double x, const char* mode) {
    const auto r = http->post("/api/move", {{"target_x", x}, {"mode", mode}});
    expect(r.status == 200, "move rejected: " + r.body);
    return r.json().at("run_id").get<std::string>();
  }

  json report(const std::string& id) {
    json out;
    expect(testing::eventually(
               [&] {
                 const auto r = http->get("/api/runs/" + id + "/validation");
                 if (r.status != 200) return false;
                 out = r.json();
                 return true;
               },
               60s),
           "no validation report for " + id);
    return out;
  }

  testing::TempDir dir{"ct-acc-stack"};
  std::unique_ptr<app::Stack> stack;
  std::unique_ptr<gateway::HttpClient> http;
};

std::string end_to_end() {
  LiveStack live(0.0);
  bus::LoopbackClient tap(live.stack->broker());
  std::atomic<int> alerts{0};
  std::mutex mutex;
  std::string alert_run;
  auto sub = tap.subscribe(bus::topics::validation_alert, [&](const bus::BusMessage& m) {
    std::lock_guard lock(mutex);
    alert_run = m.payload.value("run_id", "");
    ++alerts;
  });

  expect(live.http->post("/api/home").status == 200, "home failed");
  const std::string nominal = live.move(0.5, "zv_shaped");
  const json ok = live.report(nominal);
  expect(ok.at("overall_pass") == true, "nominal run failed validation: " + ok.dump());

  const auto f = live.http->post("/api/faults", {{"damping_scale", 1.5}});
  expect(f.status == 200, "fault injection rejected");
  const std::string faulted = live.move(0.0, "trapezoid");
  const json bad = live.report(faulted);
  expect(bad.at("overall_pass") == false, "fault run passed validation");
  testing::eventually([&] { return alerts.load() >= 1; });
  std::this_thread::sleep_for(500ms);
  expect(alerts.load() == 1, str(alerts.load()) + " alerts observed, expected 1");
  {
    std::lock_guard lock(mutex);
    expect(alert_run == faulted, "alert names " + alert_run);
  }
  const auto persisted = live.http->get("/api/runs/" + faulted);
  expect(persisted.status == 200 && persisted.json().at("validated") == true,
         "fault report not retrievable");

  std::size_t failed = 0;
  bool theta_rmse_failed = false;
  std::string names;
  for (const auto& r : bad.at("results")) {
    if (r.at("pass") == true) continue;
    ++failed;
    const std::string name = r.at("signal").get<std::string>() + "/" + r.at("metric").get<std::string>();
    theta_rmse_failed = theta_rmse_failed || name == "theta/rmse";
    names += (names.empty() ? "" : ", ") + name;
  }
  expect(theta_rmse_failed, "theta/rmse passed on the fault run");
  return "nominal run passes; damping x1.5 run fails " + names +
         " with exactly 1 alert; report retrievable";
}

struct StreamTap {
  explicit StreamTap(int port) {
    worker = std::thread([this, port] {
      gateway::HttpClient client("127.0.0.1", port, 60.0);
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

std::string gateway_surface() {
  LiveStack live(4.0);
  auto& http = *live.http;
  StreamTap tap(live.stack->gateway_port());
  expect(testing::eventually([&] { return tap.count("heartbeat") >= 1; }), "no stream heartbeat");

  expect(http.get("/api/status").status == 200, "status");
  expect(http.get("/api/runs").status == 200, "runs list");
  expect(http.post("/api/move", {{"target_x", 0.3}}).status == 409, "move before home not 409");
  expect(http.post("/api/home").status == 200, "home");
  expect(http.post("/api/magnet", {{"on", true}}).status == 200, "magnet");
  expect(http.post("/api/magnet", {{"on", false}}).status == 200, "magnet");

  const std::string id = live.move(0.5, "zv_shaped");
  const auto conflict = http.post("/api/move", {{"target_x", 0.1}});
  expect(conflict.status == 409 && conflict.json().at("code") == "conflict",
         "move during a run gave " + str(conflict.status));
  live.report(id);

  expect(http.get("/api/runs/run-unknown").status == 404, "unknown run not 404");
  expect(http.get("/api/runs/run-unknown/trace").status == 404, "unknown trace not 404");
  expect(http.get("/api/runs/run-unknown/validation").status == 404, "unknown report not 404");
  expect(http.put("/api/config", {{"logger", {{"writeout_decimation", 0}}}}).status == 400,
         "invalid config not 400");
  expect(http.get("/api/config").status == 200, "config");
  for (const char* kind : {"measured", "simulated", "envelope_lower", "envelope_upper"})
    expect(http.get("/api/runs/" + id + "/trace?kind=" + kind).status == 200,
           std::string("trace ") + kind);

  const json measured = http.get("/api/runs/" + id + "/trace").json();
  const auto& s = measured.at("samples");
  const double expected =
      (s.back().at("t").get<double>() - s.front().at("t").get<double>()) / 0.01 + 1.0;
  testing::eventually([&] { return tap.count("state", id) + 1 >= expected; });
  std::this_thread::sleep_for(300ms);
  const double states = static_cast<double>(tap.count("state", id));
  expect(std::abs(states - expected) <= 1.0,
         "stream carried " + str(states) + " states, expected " + str(expected) + " +-1");

  expect(http.post("/api/faults", {{"damping_scale", 1.5}}).status == 200, "fault");
  const std::string faulted = live.move(0.0, "trapezoid");
  expect(live.report(faulted).at("overall_pass") == false, "fault run passed");
  expect(testing::eventually([&] { return tap.count("alert", faulted) == 1; }),
         "no alert on the stream");
  std::this_thread::sleep_for(300ms);
  expect(tap.count("alert") == 1, str(tap.count("alert")) + " stream alerts");
  return "409/404/400 surfaced; " + str(states) + " state events for " + str(expected) +
         " samples; 1 alert streamed";
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<std::string()>> criteria[] = {
      {"anti-swing efficacy", anti_swing},
      {"physics fidelity", physics_fidelity},
      {"metric correctness", metric_correctness},
      {"envelope properties", envelope_properties},
      {"end-to-end continuous validation", end_to_end},
      {"bus contract", bus_contract},
      {"historian", historian_roundtrip},
      {"gateway", gateway_surface},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    std::string detail;
    bool pass = false;
    try {
      detail = check();
      pass = true;
    } catch (const Unmet& u) {
      detail = u.what;
    } catch (const std::exception& e) {
      detail = std::string("error: ") + e.what();
    }
    failed += !pass;
    std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed,
              std::size(criteria));
  return failed == 0 ? 0 : 1;
}
