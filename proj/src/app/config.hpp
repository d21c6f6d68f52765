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
#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "crane/plant.hpp"
#include "crane/virtual_crane.hpp"
#include "historian/historian.hpp"
#include "json.hpp"
#include "model/crane_model.hpp"
#include "sim/service.hpp"
#include "sim/simulation.hpp"
#include "validation/report.hpp"
#include "validation/validator.hpp"

namespace cranetwin::app {

struct Endpoint {
  std::string host = "127.0.0.1";
  int port = 0;  // 0 = any free port
};

struct StackConfig {
  Endpoint broker{"127.0.0.1", 7878};
  Endpoint gateway{"127.0.0.1", 8080};
  std::string data_dir = "crane-twin-data";
  std::string static_dir;  // optional HMI bundle served under /

  model::CraneParameters params;
  model::CraneState initial_state{.x = 0.2, .l = 0.5};
  crane::SensorModel sensors;
  crane::WindModel wind;
  sim::EnvelopeConfig envelope;
  std::vector<validation::Threshold> thresholds;  // empty: calibrate at first start
  double threshold_multiplier = 5.0;
  std::size_t dtw_band = 20;
  historian::LoggerConfig logger;

  double time_scale = 1.0;  // 0 = as fast as possible
  std::uint64_t seed = 42;
  double plant_dt = 1e-3;
  double settle_time = 2.0;

  double heartbeat_period = 5.0;   // s, event stream keep-alive
  std::size_t stream_buffer = 256; // events per stream client before drop-oldest

  void validate() const;
  crane::VirtualCraneConfig crane_config() const;
  validation::ValidationSettings validation_settings() const;
  sim::SimulationSettings simulation_settings() const;
};

void to_json(nlohmann::json& j, const Endpoint& e);
void from_json(const nlohmann::json& j, Endpoint& e);
void to_json(nlohmann::json& j, const StackConfig& c);
void from_json(const nlohmann::json& j, StackConfig& c);

// Defaults merged with the JSON file at `path` (if non-empty).
StackConfig load_config(const std::filesystem::path& path);

// Every (signal, metric) pair.
std::vector<validation::Threshold> all_metric_pairs(double value);

// Metric values of the seeded nominal calibration experiment: home, then a
// 0.5 m zv_shaped move, sensor readings of the plant compared against the
// nominal simulation started from the first reading.
std::vector<validation::MetricResult> calibration_metrics(const StackConfig& config);

// Mutable part of the configuration shared by gateway and services. Runtime
// changes are validated as a whole, applied atomically and persisted to
// <data_dir>/config.json so they survive a restart.
class RuntimeConfig {
 public:
  RuntimeConfig(StackConfig config, historian::Historian* historian);

  StackConfig snapshot() const;
  nlohmann::json to_json() const;

  // Accepts a (partial) config document. Only logger, thresholds, envelope
  // and dtw_band may change; other fields must equal the current values.
  // Throws Error(domain) and leaves the configuration untouched on failure.
  void update(const nlohmann::json& patch);

  // Loads persisted runtime overrides, if any.
  void load_overrides();
  void persist() const;
  void set_thresholds(std::vector<validation::Threshold> thresholds);

  static std::filesystem::path overrides_path(const std::filesystem::path& data_dir);

 private:
  void apply(StackConfig next);

  mutable std::mutex mutex_;
  StackConfig config_;
  historian::Historian* historian_;
};

}  // namespace cranetwin::app
