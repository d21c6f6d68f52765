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

#include "io/codec.hpp"

#include "common/error.hpp"

using nlohmann::json;

namespace cranetwin {

namespace {

template <typename T>
void merge(const json& j, const char* key, T& field) {
  if (!j.is_object()) fail(ErrorCode::domain, "expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    field = it->get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::domain, std::string("field '") + key + "': " + e.what());
  }
}

std::string text_field(const json& j, const char* key, const std::string& fallback = {}) {
  std::string value = fallback;
  merge(j, key, value);
  return value;
}

}  // namespace

namespace model {

void to_json(json& j, const CraneParameters& p) {
  j = json{{"rope_length_min", p.rope_length_min}, {"rope_length_max", p.rope_length_max},
           {"cart_travel_max", p.cart_travel_max}, {"gravity", p.gravity},
           {"swing_damping", p.swing_damping},     {"wind_gain", p.wind_gain},
           {"cart_v_max", p.cart_v_max},           {"cart_a_max", p.cart_a_max},
           {"hoist_v_max", p.hoist_v_max},         {"hoist_a_max", p.hoist_a_max}};
}

void from_json(const json& j, CraneParameters& p) {
  merge(j, "rope_length_min", p.rope_length_min);
  merge(j, "rope_length_max", p.rope_length_max);
  merge(j, "cart_travel_max", p.cart_travel_max);
  merge(j, "gravity", p.gravity);
  merge(j, "swing_damping", p.swing_damping);
  merge(j, "wind_gain", p.wind_gain);
  merge(j, "cart_v_max", p.cart_v_max);
  merge(j, "cart_a_max", p.cart_a_max);
  merge(j, "hoist_v_max", p.hoist_v_max);
  merge(j, "hoist_a_max", p.hoist_a_max);
}

void to_json(json& j, const CraneState& s) {
  j = json{{"t", s.t},         {"x", s.x},         {"v", s.v},
           {"l", s.l},         {"l_dot", s.l_dot}, {"theta", s.theta},
           {"theta_dot", s.theta_dot}, {"wind", s.wind}, {"magnet_on", s.magnet_on}};
}

void from_json(const json& j, CraneState& s) {
  merge(j, "t", s.t);
  merge(j, "x", s.x);
  merge(j, "v", s.v);
  merge(j, "l", s.l);
  merge(j, "l_dot", s.l_dot);
  merge(j, "theta", s.theta);
  merge(j, "theta_dot", s.theta_dot);
  merge(j, "wind", s.wind);
  merge(j, "magnet_on", s.magnet_on);
}

}  // namespace model

namespace trajectory {

void to_json(json& j, const Waypoint& w) {
  j = json{{"t", w.t}, {"pos", w.pos}, {"vel", w.vel}, {"acc", w.acc}};
}

void from_json(const json& j, Waypoint& w) {
  merge(j, "t", w.t);
  merge(j, "pos", w.pos);
  merge(j, "vel", w.vel);
  merge(j, "acc", w.acc);
}

void to_json(json& j, const Trajectory& t) {
  j = json{{"id", t.id},
           {"axis", to_string(t.axis)},
           {"mode", to_string(t.mode)},
           {"dt", t.dt},
           {"design_rope_length", t.design_rope_length},
           {"damping_ratio", t.damping_ratio},
           {"waypoints", t.waypoints}};
}

void from_json(const json& j, Trajectory& t) {
  merge(j, "id", t.id);
  t.axis = parse_axis(text_field(j, "axis", std::string(to_string(t.axis))));
  t.mode = parse_mode(text_field(j, "mode", std::string(to_string(t.mode))));
  merge(j, "dt", t.dt);
  merge(j, "design_rope_length", t.design_rope_length);
  merge(j, "damping_ratio", t.damping_ratio);
  merge(j, "waypoints", t.waypoints);
}

}  // namespace trajectory

namespace sim {

void to_json(json& j, const Trace& t) {
  j = json{{"id", t.id}, {"kind", to_string(t.kind)}, {"dt", t.dt}, {"samples", t.samples}};
}

void from_json(const json& j, Trace& t) {
  merge(j, "id", t.id);
  t.kind = parse_trace_kind(text_field(j, "kind", std::string(to_string(t.kind))));
  merge(j, "dt", t.dt);
  merge(j, "samples", t.samples);
}

void to_json(json& j, const EnvelopeConfig& c) {
  json names = json::array();
  for (PerturbedParameter p : c.perturbed) names.push_back(to_string(p));
  j = json{{"ensemble_size", c.ensemble_size},
           {"perturbation", c.perturbation},
           {"perturbed_parameters", names},
           {"seed", c.seed}};
}

void from_json(const json& j, EnvelopeConfig& c) {
  long long size = static_cast<long long>(c.ensemble_size);
  merge(j, "ensemble_size", size);
  if (size < 0) fail(ErrorCode::domain, "ensemble_size must be >= 1");
  c.ensemble_size = static_cast<std::size_t>(size);
  merge(j, "perturbation", c.perturbation);
  merge(j, "seed", c.seed);
  if (j.contains("perturbed_parameters")) {
    std::vector<std::string> names;
    merge(j, "perturbed_parameters", names);
    c.perturbed.clear();
    for (const auto& n : names) c.perturbed.push_back(parse_perturbed_parameter(n));
  }
}

}  // namespace sim

namespace validation {

void to_json(json& j, const MetricResult& r) {
  j = json{{"signal", to_string(r.signal)},
           {"metric", to_string(r.metric)},
           {"value", r.value},
           {"threshold", r.threshold},
           {"pass", r.pass}};
}

void from_json(const json& j, MetricResult& r) {
  r.signal = parse_signal(text_field(j, "signal", std::string(to_string(r.signal))));
  r.metric = parse_metric(text_field(j, "metric", std::string(to_string(r.metric))));
  merge(j, "value", r.value);
  merge(j, "threshold", r.threshold);
  merge(j, "pass", r.pass);
}

void to_json(json& j, const ValidationReport& r) {
  j = json{{"run_id", r.run_id},
           {"created_at", r.created_at},
           {"results", r.results},
           {"overall_pass", r.overall_pass},
           {"notes", r.notes}};
}

void from_json(const json& j, ValidationReport& r) {
  merge(j, "run_id", r.run_id);
  merge(j, "created_at", r.created_at);
  merge(j, "results", r.results);
  merge(j, "overall_pass", r.overall_pass);
  merge(j, "notes", r.notes);
}

void to_json(json& j, const Threshold& t) {
  j = json{{"signal", to_string(t.signal)}, {"metric", to_string(t.metric)}, {"value", t.value}};
}

void from_json(const json& j, Threshold& t) {
  t.signal = parse_signal(text_field(j, "signal", std::string(to_string(t.signal))));
  t.metric = parse_metric(text_field(j, "metric", std::string(to_string(t.metric))));
  merge(j, "value", t.value);
}

}  // namespace validation

namespace historian {

void to_json(json& j, const RunRecord& r) {
  j = json{{"run_id", r.run_id},
           {"trajectory_id", r.trajectory_id},
           {"mode", r.mode},
           {"axis", r.axis},
           {"target", r.target},
           {"started_at", r.started_at},
           {"completed_at", r.completed_at ? json(*r.completed_at) : json(nullptr)},
           {"status", to_string(r.status)},
           {"fault_active", r.fault_active}};
}

void from_json(const json& j, RunRecord& r) {
  merge(j, "run_id", r.run_id);
  merge(j, "trajectory_id", r.trajectory_id);
  merge(j, "mode", r.mode);
  merge(j, "axis", r.axis);
  merge(j, "target", r.target);
  merge(j, "started_at", r.started_at);
  if (auto it = j.find("completed_at"); it != j.end()) {
    if (it->is_null())
      r.completed_at.reset();
    else
      r.completed_at = text_field(j, "completed_at");
  }
  r.status = parse_run_status(text_field(j, "status", std::string(to_string(r.status))));
  merge(j, "fault_active", r.fault_active);
}

void to_json(json& j, const LoggerConfig& c) {
  j = json{{"writeout_decimation", c.writeout_decimation},
           {"buffer_flush_period", c.buffer_flush_period}};
}

void from_json(const json& j, LoggerConfig& c) {
  // Decode through a signed type so that negative decimations are rejected
  // by validate() instead of wrapping around.
  long long decimation = static_cast<long long>(c.writeout_decimation);
  merge(j, "writeout_decimation", decimation);
  if (decimation < 0) fail(ErrorCode::domain, "writeout_decimation must be >= 1");
  c.writeout_decimation = static_cast<std::size_t>(decimation);
  merge(j, "buffer_flush_period", c.buffer_flush_period);
}

}  // namespace historian

namespace crane {

void to_json(json& j, const SensorModel& s) {
  j = json{{"encoder_resolution", s.encoder_resolution},
           {"encoder_bias", s.encoder_bias},
           {"position_noise_std", s.position_noise_std},
           {"anemometer_noise_std", s.anemometer_noise_std},
           {"sample_period", s.sample_period}};
}

void from_json(const json& j, SensorModel& s) {
  merge(j, "encoder_resolution", s.encoder_resolution);
  merge(j, "encoder_bias", s.encoder_bias);
  merge(j, "position_noise_std", s.position_noise_std);
  merge(j, "anemometer_noise_std", s.anemometer_noise_std);
  merge(j, "sample_period", s.sample_period);
}

void to_json(json& j, const WindModel& w) {
  j = json{{"mean", w.mean}, {"std", w.std}, {"relaxation_time", w.relaxation_time}};
}

void from_json(const json& j, WindModel& w) {
  merge(j, "mean", w.mean);
  merge(j, "std", w.std);
  merge(j, "relaxation_time", w.relaxation_time);
}

void to_json(json& j, const FaultSpec& f) {
  j = json{{"damping_scale", f.damping_scale},
           {"rope_length_offset", f.rope_length_offset},
           {"encoder_bias_extra", f.encoder_bias_extra},
           {"active", f.active}};
}

void from_json(const json& j, FaultSpec& f) {
  merge(j, "damping_scale", f.damping_scale);
  merge(j, "rope_length_offset", f.rope_length_offset);
  merge(j, "encoder_bias_extra", f.encoder_bias_extra);
  merge(j, "active", f.active);
}

}  // namespace crane

}  // namespace cranetwin
