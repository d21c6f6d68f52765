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

#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "bus/broker.hpp"
#include "crane/plant.hpp"
#include "historian/historian.hpp"
#include "model/crane_model.hpp"
#include "trajectory/trajectory.hpp"

namespace cranetwin::crane {

struct VirtualCraneConfig {
  model::CraneParameters params;
  model::CraneState initial{.x = 0.2, .l = 0.5};
  SensorModel sensors;
  WindModel wind;
  std::uint64_t seed = 42;
  double plant_dt = 1e-3;                // s
  double time_scale = 1.0;               // simulated seconds per wall second; 0 = unpaced
  double settle_time = 2.0;              // observation after the trajectory ends, s
  double homing_speed_fraction = 0.25;   // of cart_v_max
  double zero_rate_limit = 0.02;         // max |theta_dot| for zero(), rad/s
  double trajectory_timeout = 5.0;       // s

  void validate() const;
};

struct RunHandle {
  std::string run_id;
  std::string trajectory_id;
  std::string started_at;
  historian::RunStatus status = historian::RunStatus::running;
};

struct CraneStatus {
  model::CraneState state;  // latest sensor reading
  bool homed = false;
  bool busy = false;
  bool fault_active = false;
  std::optional<std::string> run_id;
};

// The simulated physical crane behind its command surface. One owning thread
// integrates the plant and samples the sensors; commands are serialized
// through a queue. Trajectories are requested from the trajectory service
// over the bus.
class VirtualCrane {
 public:
  // `historian` may be null (no logging).
  VirtualCrane(VirtualCraneConfig config, bus::Client& client, historian::Historian* historian);
  ~VirtualCrane();
  VirtualCrane(const VirtualCrane&) = delete;
  VirtualCrane& operator=(const VirtualCrane&) = delete;

  // Errors: domain (target out of range), busy, state (not homed),
  // timeout (no trajectory service).
  RunHandle move_to(double target_x, trajectory::Mode mode);
  RunHandle hoist_to(double target_l);

  // Blocks until the cart is at x = 0. Error(busy) while a run is active.
  void home();
  // Error(state) while the payload is swinging, Error(busy) during a run.
  void zero();
  void set_magnet(bool on);
  // Applies to the plant from the next run (or idle step) on.
  void inject_fault(const FaultSpec& fault);

  CraneStatus status() const;
  RunHandle run(const std::string& run_id) const;

  // True once no run or homing is in progress.
  bool wait_idle(std::chrono::milliseconds timeout) const;

  const VirtualCraneConfig& config() const { return config_; }

 private:
  struct RunJob {
    RunHandle handle;
    trajectory::Trajectory trajectory;
    double target = 0.0;
  };

  RunHandle start_run(trajectory::Axis axis, trajectory::Mode mode, double target);
  trajectory::Trajectory request_trajectory(const nlohmann::json& request);
  void on_trajectory_result(const bus::BusMessage& message);

  void post(std::function<void()> task);
  void loop();
  void execute_run(const RunJob& job);
  void execute_homing();
  void idle_tick();
  void apply_pending();
  // Records a sample: snapshot, historian, crane/state.
  void emit(const model::CraneState& reading, const std::string* run_id);
  void pace(std::chrono::steady_clock::time_point wall_start, double sim_elapsed) const;
  void finish_busy();

  VirtualCraneConfig config_;
  bus::Client& client_;
  historian::Historian* historian_;
  Plant plant_;  // loop thread only
  std::size_t decimation_ = 10;

  mutable std::mutex mutex_;
  mutable std::condition_variable idle_cv_;
  CraneStatus status_;
  model::CraneState truth_;  // plant state as of the last sample
  FaultSpec pending_fault_;
  bool magnet_wanted_ = false;
  std::map<std::string, RunHandle> runs_;

  std::mutex queue_mutex_;
  std::condition_variable queue_cv_;
  std::deque<std::function<void()>> queue_;
  std::atomic<bool> stopping_{false};

  std::mutex pending_mutex_;
  std::map<std::string, std::promise<nlohmann::json>> pending_;
  bus::Subscription result_sub_;

  std::thread worker_;
};

}  // namespace cranetwin::crane
