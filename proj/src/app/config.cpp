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
#include "app/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "common/error.hpp"
#include "io/codec.hpp"
#include "trajectory/trajectory.hpp"

namespace cranetwin::app {

using nlohmann::json;

namespace {

template <typename T>
void merge(const json& j, const char* key, T& field) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    it->get_to(field);
  } catch (const json::exception& e) {
    fail(ErrorCode::domain, std::string("config field '") + key + "': " + e.what());
  }
}

void merge_count(const json& j, const char* key, std::size_t& field) {
  long long value = static_cast<long long>(field);
  merge(j, key, value);
  if (value < 0) fail(ErrorCode::domain, std::string("config field '") + key + "' must be >= 0");
  field = static_cast<std::size_t>(value);
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::not_found, "cannot read config file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::domain, "config file " + path.string() + " is not valid JSON: " + e.what());
  }
}

void check_endpoint(const Endpoint& e, const char* name) {
  require(!e.host.empty(), ErrorCode::domain, std::string(name) + " host must not be empty");
  require(e.port >= 0 && e.port <= 65535, ErrorCode::domain,
          std::string(name) + " port must be in [0, 65535]");
}

}  // namespace

void to_json(json& j, const Endpoint& e) { j = json{{"host", e.host}, {"port", e.port}}; }

void from_json(const json& j, Endpoint& e) {
  require(j.is_object(), ErrorCode::domain, "endpoint must be an object");
  merge(j, "host", e.host);
  merge(j, "port", e.port);
}

void to_json(json& j, const StackConfig& c) {
  j = json{{"broker", c.broker},
           {"gateway", c.gateway},
           {"data_dir", c.data_dir},
           {"static_dir", c.static_dir},
           {"params", c.params},
           {"initial_state", c.initial_state},
           {"sensors", c.sensors},
           {"wind", c.wind},
           {"envelope", c.envelope},
           {"thresholds", c.thresholds},
           {"threshold_multiplier", c.threshold_multiplier},
           {"dtw_band", c.dtw_band},
           {"logger", c.logger},
           {"time_scale", c.time_scale},
           {"seed", c.seed},
           {"plant_dt", c.plant_dt},
           {"settle_time", c.settle_time},
           {"heartbeat_period", c.heartbeat_period},
           {"stream_buffer", c.stream_buffer}};
}

void from_json(const json& j, StackConfig& c) {
  require(j.is_object(), ErrorCode::domain, "config must be a JSON object");
  merge(j, "broker", c.broker);
  merge(j, "gateway", c.gateway);
  merge(j, "data_dir", c.data_dir);
  merge(j, "static_dir", c.static_dir);
  merge(j, "params", c.params);
  merge(j, "initial_state", c.initial_state);
  merge(j, "sensors", c.sensors);
  merge(j, "wind", c.wind);
  merge(j, "envelope", c.envelope);
  merge(j, "thresholds", c.thresholds);
  merge(j, "threshold_multiplier", c.threshold_multiplier);
  merge_count(j, "dtw_band", c.dtw_band);
  merge(j, "logger", c.logger);
  merge(j, "time_scale", c.time_scale);
  merge(j, "seed", c.seed);
  merge(j, "plant_dt", c.plant_dt);
  merge(j, "settle_time", c.settle_time);
  merge(j, "heartbeat_period", c.heartbeat_period);
  merge_count(j, "stream_buffer", c.stream_buffer);
}

void StackConfig::validate() const {
  check_endpoint(broker, "broker");
  check_endpoint(gateway, "gateway");
  require(!data_dir.empty(), ErrorCode::domain, "data_dir must not be empty");
  crane_config().validate();
  envelope.validate();
  validation_settings().validate();
  logger.validate();
  require(std::isfinite(threshold_multiplier) && threshold_multiplier > 0.0, ErrorCode::domain,
          "threshold_multiplier must be > 0");
  require(dtw_band >= 1, ErrorCode::domain, "dtw_band must be >= 1");
  require(std::isfinite(heartbeat_period) && heartbeat_period > 0.0, ErrorCode::domain,
          "heartbeat_period must be > 0");
  require(stream_buffer >= 1, ErrorCode::domain, "stream_buffer must be >= 1");
}

crane::VirtualCraneConfig StackConfig::crane_config() const {
  crane::VirtualCraneConfig c;
  c.params = params;
  c.initial = initial_state;
  c.sensors = sensors;
  c.wind = wind;
  c.seed = seed;
  c.plant_dt = plant_dt;
  c.time_scale = time_scale;
  c.settle_time = settle_time;
  return c;
}

validation::ValidationSettings StackConfig::validation_settings() const {
  return {thresholds, dtw_band};
}

sim::SimulationSettings StackConfig::simulation_settings() const { return {params, envelope}; }

StackConfig load_config(const std::filesystem::path& path) {
  StackConfig config;
  if (!path.empty()) read_json_file(path).get_to(config);
  return config;
}

std::vector<validation::Threshold> all_metric_pairs(double value) {
  std::vector<validation::Threshold> out;
  for (auto s : validation::kSignals)
    for (auto m : validation::kMetrics) out.push_back({s, m, value});
  return out;
}

std::vector<validation::MetricResult> calibration_metrics(const StackConfig& config) {
  const crane::VirtualCraneConfig cc = config.crane_config();
  cc.validate();
  const auto& p = cc.params;
  const double dt = cc.plant_dt;
  const auto decimation =
      static_cast<std::size_t>(std::llround(cc.sensors.sample_period / dt));

  crane::Plant plant(p, cc.initial, cc.sensors, cc.wind, cc.seed);

  // Homing, as the crane does it before its first move.
  const auto homing = trajectory::plan_trapezoid(plant.truth().x, 0.0,
                                                 p.cart_v_max * cc.homing_speed_fraction,
                                                 p.cart_a_max, dt);
  const std::size_t homing_steps = sim::playback_steps(homing, dt, {decimation, 0.0});
  for (std::size_t k = 0; k < homing_steps; ++k)
    plant.step(sim::playback_input(homing, k, dt), dt);
  plant.place_cart(0.0);

  const double l = plant.truth().l;
  const auto traj = trajectory::plan_zv_shaped(0.0, std::min(0.5, p.cart_travel_max), p.cart_v_max,
                                               p.cart_a_max, l,
                                               trajectory::damping_ratio_for(l, p), dt, p);
  const sim::PlaybackOptions playback{decimation, cc.settle_time};

  sim::Trace measured;
  measured.id = "calibration";
  measured.kind = sim::TraceKind::measured;
  measured.dt = cc.sensors.sample_period;
  measured.samples.push_back(plant.measure());
  const model::CraneState initial = measured.samples.front();
  const std::size_t steps = sim::playback_steps(traj, dt, playback);
  for (std::size_t k = 0; k < steps; ++k) {
    plant.step(sim::playback_input(traj, k, dt), dt);
    if ((k + 1) % decimation == 0) measured.samples.push_back(plant.measure());
  }

  const sim::Trace simulated = sim::simulate(traj, p, initial, dt, playback);
  validation::ValidationSettings settings{
      all_metric_pairs(std::numeric_limits<double>::max()), config.dtw_band};
  return validation::compare_traces(measured, simulated, settings).results;
}

// ---- RuntimeConfig ------------------------------------------------------------

RuntimeConfig::RuntimeConfig(StackConfig config, historian::Historian* historian)
    : config_(std::move(config)), historian_(historian) {
  config_.validate();
}

StackConfig RuntimeConfig::snapshot() const {
  std::lock_guard lock(mutex_);
  return config_;
}

json RuntimeConfig::to_json() const { return snapshot(); }

std::filesystem::path RuntimeConfig::overrides_path(const std::filesystem::path& data_dir) {
  return data_dir / "config.json";
}

void RuntimeConfig::update(const json& patch) {
  require(patch.is_object(), ErrorCode::domain, "config must be a JSON object");
  StackConfig next = snapshot();
  const json current = next;
  static const char* kMutable[] = {"logger", "thresholds", "envelope", "dtw_band"};
  for (const auto& [key, value] : patch.items()) {
    const bool is_mutable =
        std::find(std::begin(kMutable), std::end(kMutable), key) != std::end(kMutable);
    if (is_mutable) continue;
    if (!current.contains(key)) fail(ErrorCode::domain, "unknown config field '" + key + "'");
    // Read-only fields may be echoed back unchanged.
    json merged = current.at(key);
    if (merged.is_object() && value.is_object())
      merged.merge_patch(value);
    else
      merged = value;
    if (merged != current.at(key))
      fail(ErrorCode::domain, "config field '" + key + "' cannot be changed at runtime");
  }
  json subset = json::object();
  for (const char* key : kMutable)
    if (patch.contains(key)) subset[key] = patch.at(key);
  subset.get_to(next);
  next.validate();
  apply(std::move(next));
  persist();
}

void RuntimeConfig::apply(StackConfig next) {
  std::lock_guard lock(mutex_);
  if (historian_ && !(next.logger == config_.logger)) historian_->set_logger_config(next.logger);
  config_ = std::move(next);
}

void RuntimeConfig::set_thresholds(std::vector<validation::Threshold> thresholds) {
  StackConfig next = snapshot();
  next.thresholds = std::move(thresholds);
  next.validate();
  apply(std::move(next));
  persist();
}

void RuntimeConfig::load_overrides() {
  const StackConfig current = snapshot();
  const auto path = overrides_path(current.data_dir);
  if (!std::filesystem::exists(path)) return;
  const json overrides = read_json_file(path);
  StackConfig next = current;
  json subset = json::object();
  for (const char* key : {"logger", "thresholds", "envelope", "dtw_band"})
    if (overrides.contains(key)) subset[key] = overrides.at(key);
  subset.get_to(next);
  next.validate();
  apply(std::move(next));
}

void RuntimeConfig::persist() const {
  const StackConfig c = snapshot();
  const json overrides{{"logger", c.logger},
                       {"thresholds", c.thresholds},
                       {"envelope", c.envelope},
                       {"dtw_band", c.dtw_band}};
  const auto path = overrides_path(c.data_dir);
  std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) fail(ErrorCode::storage, "cannot write " + tmp);
    out << overrides.dump(2) << '\n';
    if (!out) fail(ErrorCode::storage, "cannot write " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::storage, "cannot replace " + path.string() + ": " + ec.message());
}

}  // namespace cranetwin::app
