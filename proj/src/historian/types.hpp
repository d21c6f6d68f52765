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
#include <optional>
#include <string>
#include <string_view>

namespace cranetwin::historian {

enum class RunStatus { running, completed, aborted };

std::string_view to_string(RunStatus status) noexcept;
RunStatus parse_run_status(std::string_view text);

struct RunRecord {
  std::string run_id;
  std::string trajectory_id;
  std::string mode;  // "trapezoid" | "zv_shaped"
  std::string axis;  // "cart" | "hoist"
  double target = 0.0;
  std::string started_at;
  std::optional<std::string> completed_at;
  RunStatus status = RunStatus::running;
  bool fault_active = false;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct LoggerConfig {
  std::size_t writeout_decimation = 1;
  double buffer_flush_period = 1.0;  // s

  void validate() const;
  friend bool operator==(const LoggerConfig&, const LoggerConfig&) = default;
};

}  // namespace cranetwin::historian
