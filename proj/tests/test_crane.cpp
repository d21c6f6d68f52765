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

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

#include "bus/broker.hpp"
#include "crane/plant.hpp"
#include "crane/virtual_crane.hpp"
#include "doctest.h"
#include "historian/historian.hpp"
#include "io/codec.hpp"
#include "sim/simulation.hpp"
#include "support.hpp"
#include "trajectory/service.hpp"
#include "validation/validator.hpp"

using namespace cranetwin;
using namespace cranetwin::crane;
using nlohmann::json;
using namespace std::chrono_literals;

namespace {

VirtualCraneConfig fast_config() {
  VirtualCraneConfig c;
  c.time_scale = 0.0;
  return c;
}

// Broker, trajectory service, historian and one crane, all in-process.
struct Rig {
  explicit Rig(VirtualCraneConfig config = fast_config())
      : hist(dir.path()),
        traj_client(broker),
        crane_client(broker),
        tap(broker),
        service(traj_client, [p = config.params] { return p; }) {
    auto record = [this](const bus::BusMessage& m) {
      std::lock_guard lock(mutex);
      events.push_back(m);
    };
    subs.push_back(tap.subscribe("crane/#", record));
    crane = std::make_unique<VirtualCrane>(config, crane_client, &hist);
  }

  RunHandle finish(RunHandle h) {
    REQUIRE(crane->wait_idle(60s));
    // run/completed is published just before busy drops; give the tap a moment.
    REQUIRE(testing::eventually([&] { return count("crane/run/completed", h.run_id) == 1; }));
    return crane->run(h.run_id);
  }

  std::size_t count(const std::string& topic, const std::string& run_id) {
    std::lock_guard lock(mutex);
    std::size_t n = 0;
    for (const auto& e : events)
      if (e.topic == topic && (run_id.empty() || e.payload.value("run_id", json()) == run_id)) ++n;
    return n;
  }

  sim::Trace measured(const std::string& run_id) {
    return hist.query_trace(run_id, sim::TraceKind::measured);
  }

  // Nominal model replay of a run from its first measured sample.
  sim::Trace replay(const std::string& run_id) {
    std::lock_guard lock(mutex);
    for (const auto& e : events) {
      if (e.topic != "crane/run/started" || e.payload["run_id"] != run_id) continue;
      const auto traj = e.payload["trajectory"].get<trajectory::Trajectory>();
      const auto initial = e.payload["initial"].get<model::CraneState>();
      return sim::simulate(traj, crane->config().params, initial, e.payload["plant_dt"].get<double>(),
                           {e.payload["decimation"].get<std::size_t>(), e.payload["hold"].get<double>()});
    }
    FAIL("no crane/run/started for " << run_id);
    return {};
  }

  double theta_rmse(const std::string& run_id) {
    validation::ValidationSettings s{{{validation::Signal::theta, validation::Metric::rmse, 1e9}}, 20};
    return validation::compare_traces(measured(run_id), replay(run_id), s).results[0].value;
  }

  testing::TempDir dir{"ct-crane"};
  historian::Historian hist;
  bus::Broker broker;
  bus::LoopbackClient traj_client, crane_client, tap;
  trajectory::TrajectoryService service;
  std::mutex mutex;
  std::vector<bus::BusMessage> events;
  std::vector<bus::Subscription> subs;
  std::unique_ptr<VirtualCrane> crane;
};

VirtualCraneConfig ideal_sensors(VirtualCraneConfig c) {
  c.sensors.encoder_resolution = 0.0;
  c.sensors.position_noise_std = 0.0;
  c.sensors.anemometer_noise_std = 0.0;
  c.wind.std = 0.0;
  c.wind.mean = 0.0;
  return c;
}

}  // namespace

TEST_CASE("plant: wind is seeded and has the configured stationary spread") {
  const model::CraneParameters p;
  const SensorModel s;
  const WindModel w{.mean = 0.2, .std = 0.3, .relaxation_time = 2.0};
  Plant a(p, {.l = 0.5}, s, w, 7), b(p, {.l = 0.5}, s, w, 7), c(p, {.l = 0.5}, s, w, 8);
  bool differs = false;
  double sum = 0.0, sum2 = 0.0;
  const int n = 2'000'000;  // 2000 s = 1000 relaxation times
  for (int k = 0; k < n; ++k) {
    a.step({}, 1e-3);
    b.step({}, 1e-3);
    c.step({}, 1e-3);
    if (k < 5000) {
      REQUIRE(a.truth().wind == b.truth().wind);
      differs = differs || a.truth().wind != c.truth().wind;
    }
    sum += a.truth().wind;
    sum2 += a.truth().wind * a.truth().wind;
  }
  CHECK(differs);
  const double mean = sum / n;
  const double sd = std::sqrt(sum2 / n - mean * mean);
  MESSAGE("wind mean " << mean << " std " << sd);
  CHECK(mean == doctest::Approx(0.2).epsilon(0.25));
  CHECK(sd == doctest::Approx(0.3).epsilon(0.15));
}

TEST_CASE("plant: encoder quantization, bias and zeroing") {
  const model::CraneParameters p;
  SensorModel s;
  s.encoder_bias = 0.01;
  const WindModel still{.mean = 0.0, .std = 0.0, .relaxation_time = 2.0};
  Plant plant(p, {.l = 0.5, .theta = 0.05}, s, still, 1);
  const double q = s.encoder_resolution;
  const double reading = plant.measure().theta;
  CHECK(std::abs(std::remainder(reading, q)) < 1e-12);  // whole counts
  CHECK(std::abs(reading - 0.06) <= q);
  plant.zero_encoder();
  CHECK(plant.measure().theta == 0.0);
  // Measures the true angle with the bias removed from then on.
  plant.step({}, 1e-3);
  CHECK(std::abs(plant.measure().theta - (plant.truth().theta - 0.05)) <= q);
}

TEST_CASE("plant: faults") {
  const model::CraneParameters p;
  const WindModel still{.mean = 0.0, .std = 0.0, .relaxation_time = 2.0};
  SensorModel s;
  s.encoder_resolution = 0.0;
  Plant nominal(p, {.l = 0.5, .theta = 0.1}, s, still, 1);
  Plant identity(p, {.l = 0.5, .theta = 0.1}, s, still, 1);
  Plant damped(p, {.l = 0.5, .theta = 0.1}, s, still, 1);
  identity.set_fault({.damping_scale = 1.0, .active = false});
  damped.set_fault({.damping_scale = 1.5, .active = true});
  CHECK(damped.fault_active());
  double e_nom = 0, e_damp = 0;
  for (int k = 0; k < 5000; ++k) {
    nominal.step({}, 1e-3);
    identity.step({}, 1e-3);
    damped.step({}, 1e-3);
    REQUIRE(identity.truth() == nominal.truth());
  }
  e_nom = model::swing_energy(nominal.truth(), p.gravity);
  e_damp = model::swing_energy(damped.truth(), p.gravity);
  CHECK(e_damp < e_nom);
  CHECK(testing::code_of([&] { damped.set_fault({.damping_scale = 0.0}); }) == ErrorCode::domain);

  Plant biased(p, {.l = 0.5}, s, still, 1);
  biased.set_fault({.encoder_bias_extra = 0.02, .active = true});
  CHECK(biased.measure().theta == doctest::Approx(0.02));
}

TEST_CASE("config validation") {
  VirtualCraneConfig c = fast_config();
  CHECK_NOTHROW(c.validate());
  c.sensors.sample_period = 0.0105;  // not a whole number of plant steps
  CHECK(testing::code_of([&] { c.validate(); }) == ErrorCode::domain);
  c = fast_config();
  c.time_scale = -1.0;
  CHECK(testing::code_of([&] { c.validate(); }) == ErrorCode::domain);
}

TEST_CASE("virtual crane: preconditions") {
  Rig rig;
  CHECK(testing::code_of([&] { rig.crane->move_to(0.5, trajectory::Mode::zv_shaped); }) ==
        ErrorCode::state);
  CHECK(testing::code_of([&] { rig.crane->hoist_to(0.4); }) == ErrorCode::state);
  CHECK_FALSE(rig.crane->status().homed);

  rig.crane->home();
  const CraneStatus st = rig.crane->status();
  CHECK(st.homed);
  CHECK_FALSE(st.busy);
  CHECK(std::abs(st.state.x) <= 1e-9);
  CHECK(st.state.v == 0.0);
  CHECK(std::isfinite(st.state.wind));

  CHECK(testing::code_of([&] { rig.crane->move_to(-0.1, trajectory::Mode::trapezoid); }) ==
        ErrorCode::domain);
  CHECK(testing::code_of([&] { rig.crane->move_to(1.5, trajectory::Mode::trapezoid); }) ==
        ErrorCode::domain);
  CHECK(testing::code_of([&] { rig.crane->hoist_to(0.1); }) == ErrorCode::domain);
  CHECK(testing::code_of([&] { rig.crane->inject_fault({.damping_scale = -1.0}); }) ==
        ErrorCode::domain);
  CHECK_FALSE(rig.crane->status().busy);
}

TEST_CASE("virtual crane: home is idempotent") {
  Rig rig;
  rig.crane->home();
  rig.crane->home();
  CHECK(rig.crane->status().homed);
  CHECK(std::abs(rig.crane->status().state.x) <= 1e-9);
}

TEST_CASE("virtual crane: mutual exclusion") {
  VirtualCraneConfig c = fast_config();
  c.time_scale = 20.0;  // slow enough to overlap commands
  Rig rig(c);
  rig.crane->home();
  const RunHandle first = rig.crane->move_to(0.6, trajectory::Mode::trapezoid);
  CHECK(rig.crane->status().busy);
  CHECK(rig.crane->status().run_id == first.run_id);
  CHECK(testing::code_of([&] { rig.crane->move_to(0.2, trajectory::Mode::trapezoid); }) ==
        ErrorCode::busy);
  CHECK(testing::code_of([&] { rig.crane->home(); }) == ErrorCode::busy);
  CHECK(testing::code_of([&] { rig.crane->zero(); }) == ErrorCode::busy);
  const RunHandle done = rig.finish(first);
  CHECK(done.status == historian::RunStatus::completed);
  CHECK(rig.crane->status().state.x == doctest::Approx(0.6).epsilon(1e-6));
  CHECK(rig.count("crane/run/started", "") == 1);
}

TEST_CASE("virtual crane: lifecycle events, uniform sampling, one state per sample") {
  Rig rig;
  rig.crane->home();
  const RunHandle h = rig.finish(rig.crane->move_to(0.3, trajectory::Mode::zv_shaped));
  CHECK(h.status == historian::RunStatus::completed);
  const sim::Trace m = rig.measured(h.run_id);
  REQUIRE(m.samples.size() > 100);
  for (std::size_t i = 1; i < m.samples.size(); ++i)
    REQUIRE(m.samples[i].t - m.samples[i - 1].t == doctest::Approx(0.01).epsilon(1e-9));
  CHECK(rig.count("crane/state", h.run_id) == m.samples.size());
  std::lock_guard lock(rig.mutex);
  std::size_t started = 0, completed = 0;
  for (std::size_t i = 0; i < rig.events.size(); ++i) {
    const auto& e = rig.events[i];
    if (e.payload.value("run_id", json()) != h.run_id) continue;
    if (e.topic == "crane/run/started") started = i + 1;
    if (e.topic == "crane/run/completed") {
      completed = i + 1;
      CHECK(e.payload["samples"] == m.samples.size());
      CHECK(e.payload["status"] == "completed");
    }
  }
  CHECK(started > 0);
  CHECK(completed > started);
  const auto rec = rig.hist.get_run(h.run_id);
  CHECK(rec.status == historian::RunStatus::completed);
  CHECK(rec.mode == "zv_shaped");
}

TEST_CASE("virtual crane: null move") {
  Rig rig;
  rig.crane->home();
  const double theta_before = rig.crane->status().state.theta;
  const RunHandle h = rig.finish(rig.crane->move_to(0.0, trajectory::Mode::zv_shaped));
  CHECK(h.status == historian::RunStatus::completed);
  const sim::Trace m = rig.measured(h.run_id);
  CHECK(m.samples.size() == 1);
  CHECK(rig.crane->status().state.theta == theta_before);
}

TEST_CASE("virtual crane: zv move leaves little residual swing") {
  VirtualCraneConfig c = fast_config();
  c.initial.x = 0.0;  // homing without motion, payload at rest
  Rig rig(c);
  rig.crane->home();
  const RunHandle h = rig.finish(rig.crane->move_to(0.5, trajectory::Mode::zv_shaped));
  const sim::Trace m = rig.measured(h.run_id);
  // Everything after the motion (the settle hold) is residual swing.
  const double hold_start = m.samples.back().t - c.settle_time;
  double residual = 0.0;
  for (const auto& s : m.samples)
    if (s.t >= hold_start) residual = std::max(residual, std::abs(s.theta));
  MESSAGE("measured residual " << residual);
  CHECK(residual < 2e-3);
  CHECK(m.samples.back().x == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("virtual crane: hoist tracking") {
  Rig rig;
  rig.crane->home();
  const RunHandle h = rig.finish(rig.crane->hoist_to(0.35));
  CHECK(h.status == historian::RunStatus::completed);
  CHECK(std::abs(rig.crane->status().state.l - 0.35) < 1e-3);
  CHECK(rig.hist.get_run(h.run_id).axis == "hoist");
  const RunHandle same = rig.finish(rig.crane->hoist_to(rig.crane->status().state.l));
  CHECK(rig.measured(same.run_id).samples.size() == 1);
}

TEST_CASE("virtual crane: measured equals simulated with ideal sensors") {
  Rig rig(ideal_sensors(fast_config()));
  rig.crane->home();
  for (auto mode : {trajectory::Mode::trapezoid, trajectory::Mode::zv_shaped}) {
    const double target = mode == trajectory::Mode::trapezoid ? 0.7 : 0.1;
    const RunHandle h = rig.finish(rig.crane->move_to(target, mode));
    const sim::Trace m = rig.measured(h.run_id);
    const sim::Trace s = rig.replay(h.run_id);
    REQUIRE(m.samples.size() == s.samples.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < m.samples.size(); ++i) {
      const auto& a = m.samples[i];
      const auto& b = s.samples[i];
      for (double d : {a.t - b.t, a.x - b.x, a.v - b.v, a.l - b.l, a.l_dot - b.l_dot,
                       a.theta - b.theta, a.theta_dot - b.theta_dot, a.wind - b.wind})
        worst = std::max(worst, std::abs(d));
    }
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("virtual crane: zeroing") {
  VirtualCraneConfig c = fast_config();
  c.initial.x = 0.0;
  c.wind.std = 0.0;
  c.sensors.encoder_bias = 0.01;
  Rig rig(c);
  rig.crane->home();
  const double q = c.sensors.encoder_resolution;
  const double before = rig.crane->status().state.theta;
  CHECK(std::abs(before - 0.01) <= q);
  rig.crane->zero();
  const double after = rig.crane->status().state.theta;
  CHECK(after == 0.0);
  CHECK(std::abs((before - after) - 0.01) <= q);
  // Readings of the next run stay centred on zero with the payload at rest.
  const RunHandle h = rig.finish(rig.crane->move_to(0.0, trajectory::Mode::zv_shaped));
  CHECK(rig.measured(h.run_id).samples.front().theta == 0.0);

  // A trapezoid move leaves the payload swinging; zeroing must refuse.
  rig.finish(rig.crane->move_to(0.5, trajectory::Mode::trapezoid));
  CHECK(testing::code_of([&] { rig.crane->zero(); }) == ErrorCode::state);
}

TEST_CASE("virtual crane: magnet") {
  Rig rig;
  rig.crane->home();
  rig.crane->set_magnet(true);
  CHECK(rig.crane->status().state.magnet_on);
  rig.crane->set_magnet(true);
  CHECK(rig.crane->status().state.magnet_on);
  const RunHandle h = rig.finish(rig.crane->move_to(0.2, trajectory::Mode::zv_shaped));
  for (const auto& s : rig.measured(h.run_id).samples) REQUIRE(s.magnet_on);
  rig.crane->set_magnet(false);
  CHECK_FALSE(rig.crane->status().state.magnet_on);
  const RunHandle h2 = rig.finish(rig.crane->move_to(0.0, trajectory::Mode::zv_shaped));
  for (const auto& s : rig.measured(h2.run_id).samples) REQUIRE_FALSE(s.magnet_on);
}

TEST_CASE("virtual crane: seeded runs are reproducible; identity fault changes nothing") {
  Rig a, b;
  b.crane->inject_fault({.damping_scale = 1.0, .active = false});
  a.crane->home();
  b.crane->home();
  const RunHandle ha = a.finish(a.crane->move_to(0.4, trajectory::Mode::zv_shaped));
  const RunHandle hb = b.finish(b.crane->move_to(0.4, trajectory::Mode::zv_shaped));
  const auto ma = a.measured(ha.run_id), mb = b.measured(hb.run_id);
  REQUIRE(ma.samples.size() == mb.samples.size());
  for (std::size_t i = 0; i < ma.samples.size(); ++i) REQUIRE(ma.samples[i] == mb.samples[i]);
  CHECK_FALSE(b.crane->status().fault_active);
}

TEST_CASE("virtual crane: damping fault raises the theta metric; clearing restores it") {
  VirtualCraneConfig c = fast_config();
  c.initial.x = 0.0;
  Rig rig(c);
  rig.crane->home();
  const double nominal = rig.theta_rmse(rig.finish(rig.crane->move_to(0.5, trajectory::Mode::zv_shaped)).run_id);
  rig.crane->inject_fault({.damping_scale = 1.5, .active = true});
  CHECK(rig.crane->status().fault_active);
  const RunHandle fh = rig.finish(rig.crane->move_to(0.0, trajectory::Mode::zv_shaped));
  CHECK(rig.hist.get_run(fh.run_id).fault_active);
  const double faulted = rig.theta_rmse(fh.run_id);
  rig.crane->inject_fault({});
  const double cleared = rig.theta_rmse(rig.finish(rig.crane->move_to(0.5, trajectory::Mode::zv_shaped)).run_id);
  MESSAGE("theta rmse nominal " << nominal << " fault " << faulted << " cleared " << cleared);
  CHECK(faulted > nominal);
  CHECK(faulted > cleared);
  CHECK(cleared < 2.0 * nominal);
}

TEST_CASE("virtual crane: missing trajectory service times out") {
  bus::Broker broker;
  bus::LoopbackClient client(broker);
  VirtualCraneConfig c = fast_config();
  c.trajectory_timeout = 0.2;
  VirtualCrane crane(c, client, nullptr);
  crane.home();
  CHECK(testing::code_of([&] { crane.move_to(0.5, trajectory::Mode::zv_shaped); }) ==
        ErrorCode::timeout);
  CHECK_FALSE(crane.status().busy);
}

TEST_CASE("virtual crane: paced idle telemetry") {
  VirtualCraneConfig c = fast_config();
  c.time_scale = 1.0;
  Rig rig(c);
  const double t0 = rig.crane->status().state.t;
  REQUIRE(testing::eventually([&] { return rig.crane->status().state.t > t0 + 0.1; }, 5s));
  CHECK_FALSE(rig.crane->status().busy);
}
