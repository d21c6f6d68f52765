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

#include "model/crane_model.hpp"

#include <cmath>
#include <string>

#include "common/error.hpp"

namespace cranetwin::model {

namespace {

void check_finite(double value, const char* field) {
  if (!std::isfinite(value))
    fail(ErrorCode::domain, std::string("non-finite state field '") + field + "'");
}

void check_state(const CraneState& s) {
  check_finite(s.t, "t");
  check_finite(s.x, "x");
  check_finite(s.v, "v");
  check_finite(s.l, "l");
  check_finite(s.l_dot, "l_dot");
  check_finite(s.theta, "theta");
  check_finite(s.theta_dot, "theta_dot");
  check_finite(s.wind, "wind");
}

void check_result(double value, const char* field) {
  if (!std::isfinite(value))
    fail(ErrorCode::numerical, std::string("integration produced non-finite '") + field + "'");
}

// Dynamic part of the state as seen by the integrator.
struct Vec6 {
  double x, v, l, l_dot, theta, theta_dot;
};

Vec6 rate(const Vec6& y, double wind, const PlantInput& u, const CraneParameters& p) {
  const double a_wind = p.wind_gain * wind * std::abs(wind);
  const double c = std::cos(y.theta);
  const double theta_ddot =
      -(u.a_cart * c + p.gravity * std::sin(y.theta) + 2.0 * y.l_dot * y.theta_dot +
        a_wind * c) / y.l -
      p.swing_damping * y.theta_dot;
  return {y.v, u.a_cart, y.l_dot, u.a_hoist, y.theta_dot, theta_ddot};
}

Vec6 axpy(const Vec6& y, double h, const Vec6& k) {
  return {y.x + h * k.x,         y.v + h * k.v,         y.l + h * k.l,
          y.l_dot + h * k.l_dot, y.theta + h * k.theta, y.theta_dot + h * k.theta_dot};
}

}  // namespace

void CraneParameters::validate() const {
  auto check = [](bool ok, const char* what) {
    if (!ok) fail(ErrorCode::domain, std::string("invalid crane parameters: ") + what);
  };
  check(std::isfinite(rope_length_min) && std::isfinite(rope_length_max) &&
            std::isfinite(cart_travel_max) && std::isfinite(gravity) &&
            std::isfinite(swing_damping) && std::isfinite(wind_gain) &&
            std::isfinite(cart_v_max) && std::isfinite(cart_a_max) &&
            std::isfinite(hoist_v_max) && std::isfinite(hoist_a_max),
        "all fields must be finite");
  check(rope_length_min > 0.0, "rope_length_min must be > 0");
  check(rope_length_min < rope_length_max, "rope_length_min must be < rope_length_max");
  check(cart_travel_max > 0.0, "cart_travel_max must be > 0");
  check(gravity > 0.0, "gravity must be > 0");
  check(swing_damping >= 0.0, "swing_damping must be >= 0");
  check(cart_v_max > 0.0 && cart_a_max > 0.0, "cart rate limits must be > 0");
  check(hoist_v_max > 0.0 && hoist_a_max > 0.0, "hoist rate limits must be > 0");
}

StateDerivative derivatives(const CraneState& state, const PlantInput& input,
                            const CraneParameters& params) {
  check_state(state);
  check_finite(input.a_cart, "a_cart");
  check_finite(input.a_hoist, "a_hoist");
  if (state.l <= 0.0) fail(ErrorCode::singularity, "rope length must be > 0");

  const Vec6 y{state.x, state.v, state.l, state.l_dot, state.theta, state.theta_dot};
  const Vec6 k = rate(y, state.wind, input, params);
  return {k.x, k.v, k.l, k.l_dot, k.theta, k.theta_dot};
}

CraneState step_rk4(const CraneState& state, const PlantInput& input, double dt,
                    const CraneParameters& params) {
  if (!(dt >= 0.0) || !std::isfinite(dt)) fail(ErrorCode::domain, "dt must be finite and >= 0");
  if (dt == 0.0) return state;
  check_state(state);
  check_finite(input.a_cart, "a_cart");
  check_finite(input.a_hoist, "a_hoist");
  if (state.l <= 0.0) fail(ErrorCode::singularity, "rope length must be > 0");

  const Vec6 y{state.x, state.v, state.l, state.l_dot, state.theta, state.theta_dot};
  const Vec6 k1 = rate(y, state.wind, input, params);
  const Vec6 k2 = rate(axpy(y, 0.5 * dt, k1), state.wind, input, params);
  const Vec6 k3 = rate(axpy(y, 0.5 * dt, k2), state.wind, input, params);
  const Vec6 k4 = rate(axpy(y, dt, k3), state.wind, input, params);

  const double w = dt / 6.0;
  CraneState next = state;
  next.t = state.t + dt;
  next.x = y.x + w * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
  next.v = y.v + w * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
  next.l = y.l + w * (k1.l + 2.0 * k2.l + 2.0 * k3.l + k4.l);
  next.l_dot = y.l_dot + w * (k1.l_dot + 2.0 * k2.l_dot + 2.0 * k3.l_dot + k4.l_dot);
  next.theta = y.theta + w * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta);
  next.theta_dot =
      y.theta_dot + w * (k1.theta_dot + 2.0 * k2.theta_dot + 2.0 * k3.theta_dot + k4.theta_dot);

  check_result(next.x, "x");
  check_result(next.v, "v");
  check_result(next.l, "l");
  check_result(next.l_dot, "l_dot");
  check_result(next.theta, "theta");
  check_result(next.theta_dot, "theta_dot");

  if (next.x < 0.0) {
    next.x = 0.0;
    next.v = 0.0;
  } else if (next.x > params.cart_travel_max) {
    next.x = params.cart_travel_max;
    next.v = 0.0;
  }
  if (next.l < params.rope_length_min) {
    next.l = params.rope_length_min;
    next.l_dot = 0.0;
  } else if (next.l > params.rope_length_max) {
    next.l = params.rope_length_max;
    next.l_dot = 0.0;
  }
  return next;
}

double natural_frequency(double l, const CraneParameters& params) {
  if (!(l > 0.0) || !std::isfinite(l)) fail(ErrorCode::domain, "rope length must be > 0");
  return std::sqrt(params.gravity / l);
}

double swing_energy(const CraneState& s, double gravity) {
  const double tangential = s.l * s.theta_dot;
  return 0.5 * tangential * tangential + gravity * s.l * (1.0 - std::cos(s.theta));
}

}  // namespace cranetwin::model
