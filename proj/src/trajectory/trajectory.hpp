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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "model/crane_model.hpp"

namespace cranetwin::trajectory {

enum class Axis { cart, hoist };
enum class Mode { trapezoid, zv_shaped };

std::string_view to_string(Axis axis) noexcept;
std::string_view to_string(Mode mode) noexcept;
Axis parse_axis(std::string_view text);
// Accepts "trapezoid"/"trap" and "zv_shaped"/"zv".
Mode parse_mode(std::string_view text);

// acc is the command held over [t, t + dt); the last waypoint always carries
// acc = 0.
struct Waypoint {
  double t = 0.0;
  double pos = 0.0;
  double vel = 0.0;
  double acc = 0.0;

  friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

struct Trajectory {
  std::string id;
  Axis axis = Axis::cart;
  Mode mode = Mode::trapezoid;
  double dt = 1e-3;
  std::vector<Waypoint> waypoints;
  double design_rope_length = 0.0;  // zv_shaped only
  double damping_ratio = 0.0;       // zv_shaped only

  double duration() const { return waypoints.empty() ? 0.0 : waypoints.back().t - waypoints.front().t; }
  double start_pos() const { return waypoints.front().pos; }
  double end_pos() const { return waypoints.back().pos; }
};

// Continuous rest-to-rest profile with phase boundaries aligned to the grid.
// The achieved peak velocity/acceleration never exceed the requested limits.
struct TrapezoidProfile {
  double distance = 0.0;  // signed
  double accel_time = 0.0;
  double cruise_time = 0.0;
  double peak_velocity = 0.0;      // magnitude
  double peak_acceleration = 0.0;  // magnitude
  double total_time() const { return 2.0 * accel_time + cruise_time; }
};

// dt == 0 yields the exact (unaligned) time-optimal profile.
TrapezoidProfile trapezoid_profile(double p0, double p1, double v_max, double a_max, double dt);

// Time-optimal trapezoid (triangular when the cruise speed is unreachable).
// Waypoint 0 is a rest sample at t = 0 and the motion occupies
// [dt, dt + profile.total_time()].
Trajectory plan_trapezoid(double p0, double p1, double v_max, double a_max, double dt);

struct ZvShaper {
  double a1 = 0.5;
  double a2 = 0.5;
  double delay = 0.0;  // s
};

ZvShaper zv_impulses(double l, double zeta, const model::CraneParameters& params);

// Damping ratio that matches the swing damping of the plant at rope length l.
double damping_ratio_for(double l, const model::CraneParameters& params);

Trajectory plan_zv_shaped(double p0, double p1, double v_max, double a_max, double l,
                          double zeta, double dt, const model::CraneParameters& params);

Trajectory resample(const Trajectory& traj, double dt_new);

// Command applied to the plant during integration step `step` of length dt
// (zero-order hold of the trajectory acceleration).
double command_at(const Trajectory& traj, std::size_t step, double dt);

// Number of integration steps of length dt needed to play the trajectory.
std::size_t step_count(const Trajectory& traj, double dt);

std::string new_trajectory_id();

}  // namespace cranetwin::trajectory
