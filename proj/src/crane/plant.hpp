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

#include <cstdint>
#include <numbers>
#include <random>

#include "model/crane_model.hpp"

namespace cranetwin::crane {

struct SensorModel {
  // Swing-encoder quantization step; 0 disables quantization.
  double encoder_resolution = 2.0 * std::numbers::pi / 4096.0;  // rad/count
  double encoder_bias = 0.0;                                     // rad
  double position_noise_std = 0.0;                               // m
  double anemometer_noise_std = 0.0;                             // m/s
  double sample_period = 0.01;                                   // s

  void validate() const;
};

// Ornstein-Uhlenbeck wind speed with the given stationary mean and std.
struct WindModel {
  double mean = 0.0;              // m/s
  double std = 0.3;               // m/s
  double relaxation_time = 2.0;   // s

  void validate() const;
};

struct FaultSpec {
  double damping_scale = 1.0;       // multiplier on swing damping
  double rope_length_offset = 0.0;  // m, added to the rope length the swing sees
  double encoder_bias_extra = 0.0;  // rad
  bool active = false;

  void validate() const;
  friend bool operator==(const FaultSpec&, const FaultSpec&) = default;
};

// The simulated physical crane: true plant state plus sensors. Not
// thread-safe; owned by a single simulation loop.
class Plant {
 public:
  Plant(model::CraneParameters params, model::CraneState initial, SensorModel sensors,
        WindModel wind, std::uint64_t seed);

  // Integrates one step with the current fault applied, then advances wind.
  void step(const model::PlantInput& input, double dt);

  // One sensor reading of the current state.
  model::CraneState measure();

  const model::CraneState& truth() const { return state_; }
  const model::CraneParameters& params() const { return params_; }
  const SensorModel& sensors() const { return sensors_; }

  void set_fault(const FaultSpec& fault);
  const FaultSpec& fault() const { return fault_; }
  bool fault_active() const { return fault_.active; }

  void set_magnet(bool on) { state_.magnet_on = on; }

  // Recalibrates the encoder so the current reading becomes 0.
  void zero_encoder();
  double encoder_reading() const;

  // Puts the cart at rest at x (homing reference).
  void place_cart(double x);

 private:
  double raw_encoder() const;

  model::CraneParameters params_;
  model::CraneState state_;
  SensorModel sensors_;
  WindModel wind_;
  FaultSpec fault_;
  double encoder_zero_ = 0.0;
  std::mt19937_64 wind_rng_;
  std::mt19937_64 noise_rng_;
  std::normal_distribution<double> wind_normal_{0.0, 1.0};
  std::normal_distribution<double> noise_normal_{0.0, 1.0};
};

}  // namespace cranetwin::crane
