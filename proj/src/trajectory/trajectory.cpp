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

#include "trajectory/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "common/error.hpp"
#include "common/util.hpp"

namespace cranetwin::trajectory {

namespace {

constexpr double kGridSlack = 1e-9;

void check_finite(double value, const char* name) {
  if (!std::isfinite(value)) fail(ErrorCode::domain, std::string(name) + " must be finite");
}

void check_limits(double v_max, double a_max, double dt) {
  check_finite(v_max, "v_max");
  check_finite(a_max, "a_max");
  check_finite(dt, "dt");
  require(v_max > 0.0, ErrorCode::domain, "v_max must be > 0");
  require(a_max > 0.0, ErrorCode::domain, "a_max must be > 0");
  require(dt > 0.0, ErrorCode::domain, "dt must be > 0");
}

std::size_t intervals_for(double duration, double dt) {
  if (duration <= 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(duration / dt - kGridSlack));
}

// Per-interval accelerations of the planned trapezoid, including the leading
// rest interval.
std::vector<double> trapezoid_accelerations(const TrapezoidProfile& profile, double dt) {
  std::vector<double> acc;
  if (profile.distance == 0.0) return acc;
  const auto n_accel = static_cast<std::size_t>(std::llround(profile.accel_time / dt));
  const auto n_cruise = static_cast<std::size_t>(std::llround(profile.cruise_time / dt));
  const double a = std::copysign(profile.peak_acceleration, profile.distance);
  acc.reserve(1 + 2 * n_accel + n_cruise);
  acc.push_back(0.0);
  acc.insert(acc.end(), n_accel, a);
  acc.insert(acc.end(), n_cruise, 0.0);
  acc.insert(acc.end(), n_accel, -a);
  return acc;
}

// Exact integration of piecewise-constant accelerations from rest at p0.
std::vector<Waypoint> integrate(double p0, const std::vector<double>& acc, double dt) {
  std::vector<Waypoint> out;
  out.reserve(acc.size() + 1);
  Waypoint w{0.0, p0, 0.0, 0.0};
  for (std::size_t k = 0; k < acc.size(); ++k) {
    w.t = static_cast<double>(k) * dt;
    w.acc = acc[k];
    out.push_back(w);
    w.pos += w.vel * dt + 0.5 * acc[k] * dt * dt;
    w.vel += acc[k] * dt;
  }
  w.t = static_cast<double>(acc.size()) * dt;
  w.vel = 0.0;
  w.acc = 0.0;
  out.push_back(w);
  return out;
}

Trajectory make(Axis axis, Mode mode, double dt, std::vector<Waypoint> waypoints) {
  Trajectory traj;
  traj.id = new_trajectory_id();
  traj.axis = axis;
  traj.mode = mode;
  traj.dt = dt;
  traj.waypoints = std::move(waypoints);
  return traj;
}

}  // namespace

std::string_view to_string(Axis axis) noexcept {
  return axis == Axis::cart ? "cart" : "hoist";
}

std::string_view to_string(Mode mode) noexcept {
  return mode == Mode::trapezoid ? "trapezoid" : "zv_shaped";
}

Axis parse_axis(std::string_view text) {
  if (text == "cart") return Axis::cart;
  if (text == "hoist") return Axis::hoist;
  fail(ErrorCode::domain, "unknown axis '" + std::string(text) + "'");
}

Mode parse_mode(std::string_view text) {
  if (text == "trapezoid" || text == "trap") return Mode::trapezoid;
  if (text == "zv_shaped" || text == "zv") return Mode::zv_shaped;
  fail(ErrorCode::domain, "unknown mode '" + std::string(text) + "'");
}

TrapezoidProfile trapezoid_profile(double p0, double p1, double v_max, double a_max, double dt) {
  check_finite(p0, "p0");
  check_finite(p1, "p1");
  check_finite(v_max, "v_max");
  check_finite(a_max, "a_max");
  check_finite(dt, "dt");
  require(v_max > 0.0 && a_max > 0.0, ErrorCode::domain, "rate limits must be > 0");
  require(dt >= 0.0, ErrorCode::domain, "dt must be >= 0");

  TrapezoidProfile profile;
  profile.distance = p1 - p0;
  const double d = std::abs(profile.distance);
  if (d == 0.0) return profile;

  double t_a = v_max / a_max;
  double t_c = 0.0;
  if (d <= v_max * t_a) {
    t_a = std::sqrt(d / a_max);
  } else {
    t_c = (d - v_max * t_a) / v_max;
  }

  if (dt > 0.0) {
    t_a = static_cast<double>(std::max<std::size_t>(1, intervals_for(t_a, dt))) * dt;
    t_c = static_cast<double>(intervals_for(t_c, dt)) * dt;
  }
  profile.accel_time = t_a;
  profile.cruise_time = t_c;
  profile.peak_acceleration = d / (t_a * (t_a + t_c));
  profile.peak_velocity = profile.peak_acceleration * t_a;
  return profile;
}

Trajectory plan_trapezoid(double p0, double p1, double v_max, double a_max, double dt) {
  check_limits(v_max, a_max, dt);
  const TrapezoidProfile profile = trapezoid_profile(p0, p1, v_max, a_max, dt);
  if (profile.distance == 0.0) return make(Axis::cart, Mode::trapezoid, dt, {Waypoint{0.0, p0, 0.0, 0.0}});
  return make(Axis::cart, Mode::trapezoid, dt, integrate(p0, trapezoid_accelerations(profile, dt), dt));
}

double damping_ratio_for(double l, const model::CraneParameters& params) {
  return params.swing_damping / (2.0 * model::natural_frequency(l, params));
}

ZvShaper zv_impulses(double l, double zeta, const model::CraneParameters& params) {
  check_finite(zeta, "zeta");
  require(zeta >= 0.0 && zeta < 1.0, ErrorCode::domain, "damping ratio must be in [0, 1)");
  const double omega = model::natural_frequency(l, params);
  const double root = std::sqrt(1.0 - zeta * zeta);
  const double k = std::exp(-zeta * std::numbers::pi / root);
  ZvShaper shaper;
  shaper.a1 = 1.0 / (1.0 + k);
  shaper.a2 = 1.0 - shaper.a1;  // == k / (1 + k); keeps A1 + A2 == 1 exact
  shaper.delay = std::numbers::pi / (omega * root);
  return shaper;
}

Trajectory plan_zv_shaped(double p0, double p1, double v_max, double a_max, double l, double zeta,
                          double dt, const model::CraneParameters& params) {
  check_limits(v_max, a_max, dt);
  const ZvShaper shaper = zv_impulses(l, zeta, params);

  // |A1 a(t) + A2 a(t - delay)| <= (A1 + A2) max|a|, so planning the baseline
  // at a_max / (A1 + A2) keeps the shaped profile inside the original limit.
  const double gain = shaper.a1 + shaper.a2;
  const double scale = std::min(1.0, 1.0 / gain);
  const TrapezoidProfile baseline = trapezoid_profile(p0, p1, v_max * scale, a_max * scale, dt);

  Trajectory traj;
  if (baseline.distance == 0.0) {
    traj = make(Axis::cart, Mode::zv_shaped, dt, {Waypoint{0.0, p0, 0.0, 0.0}});
  } else {
    const std::vector<double> base = trapezoid_accelerations(baseline, dt);
    const auto shift = static_cast<std::size_t>(std::llround(shaper.delay / dt));
    std::vector<double> shaped(base.size() + shift, 0.0);
    for (std::size_t k = 0; k < shaped.size(); ++k) {
      const double first = k < base.size() ? base[k] : 0.0;
      const double second = (k >= shift && k - shift < base.size()) ? base[k - shift] : 0.0;
      shaped[k] = shaper.a1 * first + shaper.a2 * second;
    }
    traj = make(Axis::cart, Mode::zv_shaped, dt, integrate(p0, shaped, dt));
  }
  traj.design_rope_length = l;
  traj.damping_ratio = zeta;
  return traj;
}

Trajectory resample(const Trajectory& traj, double dt_new) {
  require(!traj.waypoints.empty(), ErrorCode::domain, "cannot resample an empty trajectory");
  require(std::isfinite(dt_new) && dt_new > 0.0, ErrorCode::domain, "dt_new must be > 0");
  if (dt_new == traj.dt) return traj;

  Trajectory out = traj;
  out.dt = dt_new;
  out.waypoints.clear();

  const auto& src = traj.waypoints;
  const double t0 = src.front().t;
  const std::size_t count = intervals_for(traj.duration(), dt_new);
  out.waypoints.reserve(count + 1);
  out.waypoints.push_back(src.front());
  for (std::size_t k = 1; k < count; ++k) {
    const double rel = static_cast<double>(k) * dt_new;
    const double pos = rel / traj.dt;
    const auto i = std::min(static_cast<std::size_t>(pos), src.size() - 1);
    Waypoint w;
    w.t = t0 + rel;
    if (i + 1 >= src.size()) {
      w.pos = src.back().pos;
      w.vel = src.back().vel;
      w.acc = src.back().acc;
    } else {
      const double frac = pos - static_cast<double>(i);
      w.pos = src[i].pos + frac * (src[i + 1].pos - src[i].pos);
      w.vel = src[i].vel + frac * (src[i + 1].vel - src[i].vel);
      w.acc = src[i].acc;
    }
    out.waypoints.push_back(w);
  }
  if (count > 0) {
    Waypoint last = src.back();
    last.t = t0 + static_cast<double>(count) * dt_new;
    out.waypoints.push_back(last);
  }
  return out;
}

double command_at(const Trajectory& traj, std::size_t step, double dt) {
  if (traj.waypoints.size() < 2) return 0.0;
  std::size_t index = step;
  if (dt != traj.dt)
    index = static_cast<std::size_t>(std::floor(static_cast<double>(step) * dt / traj.dt + kGridSlack));
  if (index + 1 >= traj.waypoints.size()) return 0.0;
  return traj.waypoints[index].acc;
}

std::size_t step_count(const Trajectory& traj, double dt) {
  require(dt > 0.0, ErrorCode::domain, "dt must be > 0");
  return intervals_for(traj.duration(), dt);
}

std::string new_trajectory_id() { return make_id("traj"); }

}  // namespace cranetwin::trajectory
