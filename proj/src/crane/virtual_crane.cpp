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
#include "crane/virtual_crane.hpp"

#include <cmath>
#include <exception>

#include "bus/topic.hpp"
#include "common/error.hpp"
#include "common/util.hpp"
#include "io/codec.hpp"
#include "sim/simulation.hpp"

namespace cranetwin::crane {

using nlohmann::json;

namespace {

json state_event(const model::CraneState& reading, const std::string* run_id) {
  json payload = reading;
  payload["run_id"] = run_id ? json(*run_id) : json(nullptr);
  return payload;
}

}  // namespace

void VirtualCraneConfig::validate() const {
  params.validate();
  sensors.validate();
  wind.validate();
  require(std::isfinite(plant_dt) && plant_dt > 0.0, ErrorCode::domain, "plant_dt must be > 0");
  const double ratio = sensors.sample_period / plant_dt;
  require(ratio >= 1.0 - 1e-9 && std::abs(ratio - std::round(ratio)) < 1e-6, ErrorCode::domain,
          "sample_period must be a whole multiple of plant_dt");
  require(std::isfinite(time_scale) && time_scale >= 0.0, ErrorCode::domain,
          "time_scale must be >= 0");
  require(std::isfinite(settle_time) && settle_time >= 0.0, ErrorCode::domain,
          "settle_time must be >= 0");
  require(homing_speed_fraction > 0.0 && homing_speed_fraction <= 1.0, ErrorCode::domain,
          "homing_speed_fraction must be in (0, 1]");
  require(std::isfinite(zero_rate_limit) && zero_rate_limit > 0.0, ErrorCode::domain,
          "zero_rate_limit must be > 0");
  require(std::isfinite(trajectory_timeout) && trajectory_timeout > 0.0, ErrorCode::domain,
          "trajectory_timeout must be > 0");
  require(initial.x >= 0.0 && initial.x <= params.cart_travel_max, ErrorCode::domain,
          "initial x outside the cart travel");
  require(initial.l >= params.rope_length_min && initial.l <= params.rope_length_max,
          ErrorCode::domain, "initial l outside the rope limits");
}

VirtualCrane::VirtualCrane(VirtualCraneConfig config, bus::Client& client,
                           historian::Historian* historian)
    : config_((config.validate(), config)),
      client_(client),
      historian_(historian),
      plant_(config_.params, config_.initial, config_.sensors, config_.wind, config_.seed) {
  decimation_ = static_cast<std::size_t>(std::llround(config_.sensors.sample_period / config_.plant_dt));
  magnet_wanted_ = config_.initial.magnet_on;
  status_.state = plant_.measure();
  truth_ = plant_.truth();
  result_sub_ = client_.subscribe(bus::topics::trajectory_result,
                                  [this](const bus::BusMessage& m) { on_trajectory_result(m); });
  worker_ = std::thread([this] { loop(); });
}

VirtualCrane::~VirtualCrane() {
  {
    std::lock_guard lock(queue_mutex_);
    stopping_ = true;
  }
  queue_cv_.notify_all();
  if (worker_.joinable()) worker_.join();
  result_sub_.reset();
}

// ---- commands ---------------------------------------------------------------

RunHandle VirtualCrane::move_to(double target_x, trajectory::Mode mode) {
  require(std::isfinite(target_x) && target_x >= 0.0 && target_x <= config_.params.cart_travel_max,
          ErrorCode::domain, "target_x must be within [0, cart_travel_max]");
  return start_run(trajectory::Axis::cart, mode, target_x);
}

RunHandle VirtualCrane::hoist_to(double target_l) {
  require(std::isfinite(target_l) && target_l >= config_.params.rope_length_min &&
              target_l <= config_.params.rope_length_max,
          ErrorCode::domain, "target_l must be within [rope_length_min, rope_length_max]");
  return start_run(trajectory::Axis::hoist, trajectory::Mode::trapezoid, target_l);
}

RunHandle VirtualCrane::start_run(trajectory::Axis axis, trajectory::Mode mode, double target) {
  model::CraneState from;
  {
    std::lock_guard lock(mutex_);
    if (status_.busy) fail(ErrorCode::busy, "a run is in progress");
    if (!status_.homed) fail(ErrorCode::state, "crane is not homed");
    status_.busy = true;
    from = truth_;
  }

  RunJob job;
  job.target = target;
  try {
    const bool cart = axis == trajectory::Axis::cart;
    json request{{"request_id", make_id("trq")},
                 {"axis", trajectory::to_string(axis)},
                 {"mode", trajectory::to_string(mode)},
                 {"p0", cart ? from.x : from.l},
                 {"p1", target},
                 {"l", from.l},
                 {"dt", config_.plant_dt}};
    job.trajectory = request_trajectory(request);
    job.handle.run_id = make_id("run");
    job.handle.trajectory_id = job.trajectory.id;
    job.handle.started_at = utc_now_iso();
    std::lock_guard lock(mutex_);
    runs_[job.handle.run_id] = job.handle;
    status_.run_id = job.handle.run_id;
  } catch (...) {
    finish_busy();
    throw;
  }
  post([this, job] { execute_run(job); });
  return job.handle;
}

void VirtualCrane::home() {
  {
    std::lock_guard lock(mutex_);
    if (status_.busy) fail(ErrorCode::busy, "a run is in progress");
    status_.busy = true;
  }
  auto done = std::make_shared<std::promise<void>>();
  auto result = done->get_future();
  post([this, done] {
    std::exception_ptr error;
    try {
      execute_homing();
    } catch (...) {
      error = std::current_exception();
    }
    finish_busy();
    if (error)
      done->set_exception(error);
    else
      done->set_value();
  });
  result.get();
}

void VirtualCrane::zero() {
  {
    std::lock_guard lock(mutex_);
    if (status_.busy) fail(ErrorCode::busy, "a run is in progress");
  }
  auto done = std::make_shared<std::promise<void>>();
  auto result = done->get_future();
  post([this, done] {
    try {
      if (std::abs(plant_.truth().theta_dot) > config_.zero_rate_limit)
        fail(ErrorCode::state, "payload is still swinging; zeroing needs a settled swing");
      plant_.zero_encoder();
      const model::CraneState reading = plant_.measure();
      std::lock_guard lock(mutex_);
      status_.state = reading;
      done->set_value();
    } catch (...) {
      done->set_exception(std::current_exception());
    }
  });
  result.get();
}

void VirtualCrane::set_magnet(bool on) {
  {
    std::lock_guard lock(mutex_);
    magnet_wanted_ = on;
  }
  post([this] { apply_pending(); });
}

void VirtualCrane::inject_fault(const FaultSpec& fault) {
  fault.validate();
  std::lock_guard lock(mutex_);
  pending_fault_ = fault;
  status_.fault_active = fault.active;
}

CraneStatus VirtualCrane::status() const {
  std::lock_guard lock(mutex_);
  CraneStatus out = status_;
  out.state.magnet_on = magnet_wanted_;
  return out;
}

RunHandle VirtualCrane::run(const std::string& run_id) const {
  std::lock_guard lock(mutex_);
  auto it = runs_.find(run_id);
  if (it == runs_.end()) fail(ErrorCode::not_found, "unknown run '" + run_id + "'");
  return it->second;
}

bool VirtualCrane::wait_idle(std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mutex_);
  return idle_cv_.wait_for(lock, timeout, [this] { return !status_.busy; });
}

// ---- trajectory requests ----------------------------------------------------

trajectory::Trajectory VirtualCrane::request_trajectory(const json& request) {
  const std::string id = request.at("request_id").get<std::string>();
  std::future<json> answer;
  {
    std::lock_guard lock(pending_mutex_);
    answer = pending_[id].get_future();
  }
  auto forget = [&] {
    std::lock_guard lock(pending_mutex_);
    pending_.erase(id);
  };
  try {
    client_.publish(bus::topics::trajectory_request, request);
  } catch (...) {
    forget();
    throw;
  }
  const auto wait = std::chrono::duration<double>(config_.trajectory_timeout);
  if (answer.wait_for(wait) != std::future_status::ready) {
    forget();
    fail(ErrorCode::timeout, "no answer from the trajectory service");
  }
  const json result = answer.get();
  if (!result.value("ok", false)) {
    const json error = result.value("error", json::object());
    fail(parse_error_code(error.value("code", "internal")),
         error.value("message", "trajectory planning failed"));
  }
  return result.at("trajectory").get<trajectory::Trajectory>();
}

void VirtualCrane::on_trajectory_result(const bus::BusMessage& message) {
  const std::string id = message.payload.value("request_id", "");
  std::lock_guard lock(pending_mutex_);
  auto it = pending_.find(id);
  if (it == pending_.end()) return;
  it->second.set_value(message.payload);
  pending_.erase(it);
}

// ---- owning loop ------------------------------------------------------------

void VirtualCrane::post(std::function<void()> task) {
  {
    std::lock_guard lock(queue_mutex_);
    queue_.push_back(std::move(task));
  }
  queue_cv_.notify_all();
}

void VirtualCrane::loop() {
  using clock = std::chrono::steady_clock;
  const auto tick = std::chrono::duration_cast<clock::duration>(
      std::chrono::duration<double>(config_.time_scale > 0.0
                                        ? config_.sensors.sample_period / config_.time_scale
                                        : 0.0));
  auto next_tick = clock::now() + tick;
  for (;;) {
    std::function<void()> task;
    {
      std::unique_lock lock(queue_mutex_);
      auto ready = [this] { return stopping_ || !queue_.empty(); };
      if (config_.time_scale > 0.0)
        queue_cv_.wait_until(lock, next_tick, ready);
      else
        queue_cv_.wait(lock, ready);
      if (stopping_) break;
      if (!queue_.empty()) {
        task = std::move(queue_.front());
        queue_.pop_front();
      }
    }
    if (task) {
      task();
      next_tick = clock::now() + tick;
      continue;
    }
    try {
      idle_tick();
    } catch (...) {
      // idle telemetry is best effort
    }
    next_tick += tick;
    if (next_tick < clock::now()) next_tick = clock::now() + tick;
  }
}

void VirtualCrane::apply_pending() {
  FaultSpec fault;
  bool magnet;
  {
    std::lock_guard lock(mutex_);
    fault = pending_fault_;
    magnet = magnet_wanted_;
  }
  if (!(fault == plant_.fault())) plant_.set_fault(fault);
  plant_.set_magnet(magnet);
}

void VirtualCrane::idle_tick() {
  apply_pending();
  for (std::size_t k = 0; k < decimation_; ++k) plant_.step({0.0, 0.0}, config_.plant_dt);
  const model::CraneState reading = plant_.measure();
  {
    std::lock_guard lock(mutex_);
    status_.state = reading;
    truth_ = plant_.truth();
  }
  if (historian_) historian_->append_live(reading, config_.sensors.sample_period);
}

void VirtualCrane::emit(const model::CraneState& reading, const std::string* run_id) {
  {
    std::lock_guard lock(mutex_);
    status_.state = reading;
    truth_ = plant_.truth();
  }
  if (historian_) {
    if (run_id)
      historian_->append_state(*run_id, reading);
    else
      historian_->append_live(reading, config_.sensors.sample_period);
  }
  try {
    client_.publish(bus::topics::crane_state, state_event(reading, run_id));
  } catch (const Error&) {
    // at-most-once telemetry; a dropped sample is not fatal for the run
  }
}

void VirtualCrane::pace(std::chrono::steady_clock::time_point wall_start,
                        double sim_elapsed) const {
  if (config_.time_scale <= 0.0) return;
  std::this_thread::sleep_until(
      wall_start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                       std::chrono::duration<double>(sim_elapsed / config_.time_scale)));
}

void VirtualCrane::finish_busy() {
  {
    std::lock_guard lock(mutex_);
    status_.busy = false;
    status_.run_id.reset();
  }
  idle_cv_.notify_all();
}

void VirtualCrane::execute_run(const RunJob& job) {
  const std::string& run_id = job.handle.run_id;
  const trajectory::Trajectory& traj = job.trajectory;
  const sim::PlaybackOptions playback{decimation_, config_.settle_time};
  historian::RunStatus outcome = historian::RunStatus::completed;
  std::string error;
  model::CraneState reading;
  std::size_t samples = 0;
  bool created = false;

  try {
    apply_pending();
    if (historian_) {
      historian::RunRecord record;
      record.run_id = run_id;
      record.trajectory_id = traj.id;
      record.mode = std::string(trajectory::to_string(traj.mode));
      record.axis = std::string(trajectory::to_string(traj.axis));
      record.target = job.target;
      record.started_at = job.handle.started_at;
      record.fault_active = plant_.fault_active();
      historian_->create_run(record);
      created = true;
      historian_->open_measured(run_id, config_.sensors.sample_period);
    }

    reading = plant_.measure();
    client_.publish(bus::topics::run_started,
                    {{"run_id", run_id},
                     {"trajectory_id", traj.id},
                     {"axis", trajectory::to_string(traj.axis)},
                     {"mode", trajectory::to_string(traj.mode)},
                     {"target", job.target},
                     {"started_at", job.handle.started_at},
                     {"initial", reading},
                     {"trajectory", traj},
                     {"plant_dt", config_.plant_dt},
                     {"sample_period", config_.sensors.sample_period},
                     {"decimation", decimation_},
                     {"hold", config_.settle_time},
                     {"fault_active", plant_.fault_active()}});
    emit(reading, &run_id);
    ++samples;

    const std::size_t steps = sim::playback_steps(traj, config_.plant_dt, playback);
    const auto wall_start = std::chrono::steady_clock::now();
    for (std::size_t k = 0; k < steps; ++k) {
      if (stopping_) {
        outcome = historian::RunStatus::aborted;
        error = "crane shut down during the run";
        break;
      }
      {
        std::lock_guard lock(mutex_);
        plant_.set_magnet(magnet_wanted_);
      }
      plant_.step(sim::playback_input(traj, k, config_.plant_dt), config_.plant_dt);
      if ((k + 1) % decimation_ == 0) {
        reading = plant_.measure();
        emit(reading, &run_id);
        ++samples;
        pace(wall_start, static_cast<double>(k + 1) * config_.plant_dt);
      }
    }
  } catch (const std::exception& e) {
    outcome = historian::RunStatus::aborted;
    error = e.what();
  }

  if (historian_ && created) {
    try {
      historian_->complete_run(run_id, outcome);
    } catch (const std::exception& e) {
      outcome = historian::RunStatus::aborted;
      if (error.empty()) error = e.what();
    }
  }
  {
    std::lock_guard lock(mutex_);
    runs_[run_id].status = outcome;
  }
  json completed{{"run_id", run_id},
                 {"status", historian::to_string(outcome)},
                 {"completed_at", utc_now_iso()},
                 {"final", reading},
                 {"samples", samples}};
  if (!error.empty()) completed["error"] = error;
  try {
    client_.publish(bus::topics::run_completed, completed);
  } catch (const Error&) {
  }
  finish_busy();
}

void VirtualCrane::execute_homing() {
  apply_pending();
  const auto& p = config_.params;
  const trajectory::Trajectory traj =
      trajectory::plan_trapezoid(plant_.truth().x, 0.0, p.cart_v_max * config_.homing_speed_fraction,
                                 p.cart_a_max, config_.plant_dt);
  const std::size_t steps = sim::playback_steps(traj, config_.plant_dt, {decimation_, 0.0});
  const auto wall_start = std::chrono::steady_clock::now();
  for (std::size_t k = 0; k < steps && !stopping_; ++k) {
    plant_.step(sim::playback_input(traj, k, config_.plant_dt), config_.plant_dt);
    if ((k + 1) % decimation_ == 0) {
      emit(plant_.measure(), nullptr);
      pace(wall_start, static_cast<double>(k + 1) * config_.plant_dt);
    }
  }
  if (stopping_) fail(ErrorCode::state, "crane shut down during homing");
  // The end switch defines the origin.
  plant_.place_cart(0.0);
  const model::CraneState reading = plant_.measure();
  emit(reading, nullptr);
  std::lock_guard lock(mutex_);
  status_.homed = true;
}

}  // namespace cranetwin::crane
