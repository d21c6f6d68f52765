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

#include <string_view>

namespace cranetwin::bus {

// Topics are '/'-separated, non-empty, without empty levels. Published topics
// may not contain wildcards. In patterns '+' stands for exactly one level and
// '#' (only as the whole final level) for one or more remaining levels, so
// "a/#" does not match "a".

bool is_valid_topic(std::string_view topic) noexcept;
bool is_valid_pattern(std::string_view pattern) noexcept;

// Throw Error(protocol) on invalid input.
void check_topic(std::string_view topic);
void check_pattern(std::string_view pattern);

// Pure predicate; false when either argument is invalid.
bool match(std::string_view pattern, std::string_view topic) noexcept;

namespace topics {
inline constexpr std::string_view crane_state = "crane/state";
inline constexpr std::string_view run_started = "crane/run/started";
inline constexpr std::string_view run_completed = "crane/run/completed";
inline constexpr std::string_view trajectory_request = "dt/trajectory/request";
inline constexpr std::string_view trajectory_result = "dt/trajectory/result";
inline constexpr std::string_view simulation_request = "dt/simulation/request";
inline constexpr std::string_view simulation_result = "dt/simulation/result";
inline constexpr std::string_view validation_report = "dt/validation/report";
inline constexpr std::string_view validation_alert = "dt/validation/alert";
}  // namespace topics

}  // namespace cranetwin::bus
