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

#include <string>
#include <string_view>
#include <vector>

namespace cranetwin::validation {

enum class Signal { x, theta, l };
enum class Metric { rmse, max_dev, dtw };

inline constexpr Signal kSignals[] = {Signal::x, Signal::theta, Signal::l};
inline constexpr Metric kMetrics[] = {Metric::rmse, Metric::max_dev, Metric::dtw};

std::string_view to_string(Signal signal) noexcept;
std::string_view to_string(Metric metric) noexcept;
Signal parse_signal(std::string_view text);
Metric parse_metric(std::string_view text);

struct MetricResult {
  Signal signal = Signal::x;
  Metric metric = Metric::rmse;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = true;

  friend bool operator==(const MetricResult&, const MetricResult&) = default;
};

struct ValidationReport {
  std::string run_id;
  std::string created_at;
  std::vector<MetricResult> results;
  bool overall_pass = true;
  std::string notes;

  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

struct Threshold {
  Signal signal = Signal::x;
  Metric metric = Metric::rmse;
  double value = 0.0;

  friend bool operator==(const Threshold&, const Threshold&) = default;
};

}  // namespace cranetwin::validation
