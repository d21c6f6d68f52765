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

#include <cstddef>
#include <functional>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "bus/broker.hpp"
#include "historian/historian.hpp"
#include "sim/simulation.hpp"
#include "validation/report.hpp"

namespace cranetwin::validation {

struct ValidationSettings {
  std::vector<Threshold> thresholds;  // the (signal, metric) pairs to evaluate
  std::size_t dtw_band = 20;          // samples

  void validate() const;
};

// Thresholds at `multiplier` times the observed calibration values, never
// below the per-signal floor (so metrics that are exactly zero during
// calibration do not end up with a zero threshold).
std::vector<Threshold> calibrated_thresholds(const std::vector<MetricResult>& calibration,
                                             double multiplier);
double threshold_floor(Signal signal) noexcept;

// Pure comparison of two traces: the measured trace is linearly interpolated
// onto the simulated grid restricted to the overlapping time range.
// Throws Error(domain) when the time ranges do not overlap.
ValidationReport compare_traces(const sim::Trace& measured, const sim::Trace& simulated,
                                const ValidationSettings& settings);

// Loads both traces of a run, compares them and persists the report.
// Throws Error(not_found) when a trace is missing.
ValidationReport validate_run(historian::Historian& historian, const std::string& run_id,
                              const ValidationSettings& settings);

// Validates every run as soon as both its completion event and its
// simulation result have been seen, then publishes dt/validation/report and,
// for failing runs, dt/validation/alert.
class ValidationService {
 public:
  using SettingsProvider = std::function<ValidationSettings()>;

  ValidationService(bus::Client& client, historian::Historian& historian,
                    SettingsProvider settings);
  ~ValidationService();

  // Validate now and publish, regardless of which events were seen.
  ValidationReport validate_and_publish(const std::string& run_id);

 private:
  void on_completed(const bus::BusMessage& message);
  void on_simulated(const bus::BusMessage& message);
  void try_validate(const std::string& run_id);

  bus::Client& client_;
  historian::Historian& historian_;
  SettingsProvider settings_;
  std::mutex mutex_;
  std::set<std::string> completed_;
  std::set<std::string> simulated_;
  bus::Subscription completed_sub_;
  bus::Subscription simulated_sub_;
};

}  // namespace cranetwin::validation
