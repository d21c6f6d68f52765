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

// Planar gantry crane: kinematic cart and hoist carrying a point-mass payload
// on a massless rigid rope. The cart and hoist follow commanded accelerations
// exactly; only the swing angle has dynamics of its own:
//
//   theta'' = -(a_cart cos(theta) + g sin(theta) + 2 l' theta'
//               + a_wind cos(theta)) / l - c_theta theta'
//   a_wind  = k_w * wind * |wind|
//
// theta is measured from the vertical, positive when the payload is displaced
// toward +x.

namespace cranetwin::model {

struct CraneParameters {
  double rope_length_min = 0.2;   // m
  double rope_length_max = 0.9;   // m
  double cart_travel_max = 1.0;   // m
  double gravity = 9.81;          // m/s^2
  double swing_damping = 0.2;     // c_theta, 1/s
  double wind_gain = 0.01;        // k_w, 1/m
  double cart_v_max = 0.3;        // m/s
  double cart_a_max = 1.0;        // m/s^2
  double hoist_v_max = 0.1;       // m/s
  double hoist_a_max = 0.5;       // m/s^2

  // Throws Error(domain) naming the first violated invariant.
  void validate() const;

  friend bool operator==(const CraneParameters&, const CraneParameters&) = default;
};

struct CraneState {
  double t = 0.0;          // s
  double x = 0.0;          // cart position, m
  double v = 0.0;          // cart velocity, m/s
  double l = 0.5;          // rope length, m
  double l_dot = 0.0;      // m/s
  double theta = 0.0;      // rad
  double theta_dot = 0.0;  // rad/s
  double wind = 0.0;       // m/s
  bool magnet_on = false;

  friend bool operator==(const CraneState&, const CraneState&) = default;
};

struct PlantInput {
  double a_cart = 0.0;   // m/s^2
  double a_hoist = 0.0;  // m/s^2
};

// Time derivative of the dynamic fields of CraneState.
struct StateDerivative {
  double x_dot = 0.0;
  double v_dot = 0.0;
  double l_dot = 0.0;
  double l_ddot = 0.0;
  double theta_dot = 0.0;
  double theta_ddot = 0.0;

  friend bool operator==(const StateDerivative&, const StateDerivative&) = default;
};

StateDerivative derivatives(const CraneState& state, const PlantInput& input,
                            const CraneParameters& params);

// Classical fixed-step RK4 with the input held over the step. Cart position
// and rope length are clamped to their travel limits afterwards; a clamped
// axis has its velocity zeroed. dt == 0 returns the state untouched.
CraneState step_rk4(const CraneState& state, const PlantInput& input, double dt,
                    const CraneParameters& params);

// Small-angle pendulum frequency sqrt(g / l), rad/s.
double natural_frequency(double l, const CraneParameters& params);

// Specific swing energy: 1/2 (l theta')^2 + g l (1 - cos theta).
double swing_energy(const CraneState& state, double gravity);

}  // namespace cranetwin::model
