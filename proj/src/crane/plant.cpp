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

#include "crane/plant.hpp"

#include <cmath>

#include "common/error.hpp"

namespace cranetwin::crane {

void SensorModel::validate() const {
  require(std::isfinite(encoder_resolution) && encoder_resolution >= 0.0, ErrorCode::domain,
          "encoder_resolution must be >= 0");
  require(std::isfinite(encoder_bias), ErrorCode::domain, "encoder_bias must be finite");
  require(std::isfinite(position_noise_std) && position_noise_std >= 0.0, ErrorCode::domain,
          "position_noise_std must be >= 0");
  require(std::isfinite(anemometer_noise_std) && anemometer_noise_std >= 0.0, ErrorCode::domain,
          "anemometer_noise_std must be >= 0");
  require(std::isfinite(sample_period) && sample_period > 0.0, ErrorCode::domain,
          "sample_period must be > 0");
}

void WindModel::validate() const {
  require(std::isfinite(mean), ErrorCode::domain, "wind mean must be finite");
  require(std::isfinite(std) && std >= 0.0, ErrorCode::domain, "wind std must be >= 0");
  require(std::isfinite(relaxation_time) && relaxation_time > 0.0, ErrorCode::domain,
          "wind relaxation_time must be > 0");
}

void FaultSpec::validate() const {
  require(std::isfinite(damping_scale) && damping_scale > 0.0, ErrorCode::domain,
          "damping_scale must be > 0");
  require(std::isfinite(rope_length_offset), ErrorCode::domain,
          "rope_length_offset must be finite");
  require(std::isfinite(encoder_bias_extra), ErrorCode::domain,
          "encoder_bias_extra must be finite");
}

Plant::Plant(model::CraneParameters params, model::CraneState initial, SensorModel sensors,
             WindModel wind, std::uint64_t seed)
    : params_(params),
      state_(initial),
      sensors_(sensors),
      wind_(wind),
      wind_rng_(seed),
      noise_rng_(seed ^ 0x9e3779b97f4a7c15ull) {
  params_.validate();
  sensors_.validate();
  wind_.validate();
}

void Plant::step(const model::PlantInput& input, double dt) {
  if (fault_.active) {
    model::CraneParameters p = params_;
    p.swing_damping *= fault_.damping_scale;
    model::CraneState s = state_;
    s.l += fault_.rope_length_offset;
    s = model::step_rk4(s, input, dt, p);
    s.l -= fault_.rope_length_offset;
    state_ = s;
  } else {
    state_ = model::step_rk4(state_, input, dt, params_);
  }

  if (wind_.std > 0.0) {
    const double decay = std::exp(-dt / wind_.relaxation_time);
    const double spread = wind_.std * std::sqrt(1.0 - decay * decay);
    state_.wind = wind_.mean + (state_.wind - wind_.mean) * decay + spread * wind_normal_(wind_rng_);
  } else {
    state_.wind = wind_.mean;
  }
}

double Plant::raw_encoder() const {
  double angle = state_.theta + sensors_.encoder_bias;
  if (fault_.active) angle += fault_.encoder_bias_extra;
  if (sensors_.encoder_resolution > 0.0)
    angle = std::round(angle / sensors_.encoder_resolution) * sensors_.encoder_resolution;
  return angle;
}

double Plant::encoder_reading() const { return raw_encoder() - encoder_zero_; }

void Plant::zero_encoder() { encoder_zero_ = raw_encoder(); }

model::CraneState Plant::measure() {
  model::CraneState reading = state_;
  reading.theta = encoder_reading();
  if (sensors_.position_noise_std > 0.0)
    reading.x += sensors_.position_noise_std * noise_normal_(noise_rng_);
  if (sensors_.anemometer_noise_std > 0.0)
    reading.wind += sensors_.anemometer_noise_std * noise_normal_(noise_rng_);
  return reading;
}

void Plant::set_fault(const FaultSpec& fault) {
  fault.validate();
  fault_ = fault;
}

void Plant::place_cart(double x) {
  state_.x = x;
  state_.v = 0.0;
}

}  // namespace cranetwin::crane
