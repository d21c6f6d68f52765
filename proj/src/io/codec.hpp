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

// JSON mappings for every record that crosses a file, bus or HTTP boundary.
// Field names follow the C++ member names. from_json merges: absent fields
// keep the value already in the target, present fields must have the right
// type.

#include "crane/plant.hpp"
#include "historian/types.hpp"
#include "json.hpp"
#include "model/crane_model.hpp"
#include "sim/simulation.hpp"
#include "trajectory/trajectory.hpp"
#include "validation/report.hpp"

namespace cranetwin::model {
void to_json(nlohmann::json& j, const CraneParameters& p);
void from_json(const nlohmann::json& j, CraneParameters& p);
void to_json(nlohmann::json& j, const CraneState& s);
void from_json(const nlohmann::json& j, CraneState& s);
}  // namespace cranetwin::model

namespace cranetwin::trajectory {
void to_json(nlohmann::json& j, const Waypoint& w);
void from_json(const nlohmann::json& j, Waypoint& w);
void to_json(nlohmann::json& j, const Trajectory& t);
void from_json(const nlohmann::json& j, Trajectory& t);
}  // namespace cranetwin::trajectory

namespace cranetwin::sim {
void to_json(nlohmann::json& j, const Trace& t);
void from_json(const nlohmann::json& j, Trace& t);
void to_json(nlohmann::json& j, const EnvelopeConfig& c);
void from_json(const nlohmann::json& j, EnvelopeConfig& c);
}  // namespace cranetwin::sim

namespace cranetwin::validation {
void to_json(nlohmann::json& j, const MetricResult& r);
void from_json(const nlohmann::json& j, MetricResult& r);
void to_json(nlohmann::json& j, const ValidationReport& r);
void from_json(const nlohmann::json& j, ValidationReport& r);
void to_json(nlohmann::json& j, const Threshold& t);
void from_json(const nlohmann::json& j, Threshold& t);
}  // namespace cranetwin::validation

namespace cranetwin::historian {
void to_json(nlohmann::json& j, const RunRecord& r);
void from_json(const nlohmann::json& j, RunRecord& r);
void to_json(nlohmann::json& j, const LoggerConfig& c);
void from_json(const nlohmann::json& j, LoggerConfig& c);
}  // namespace cranetwin::historian

namespace cranetwin::crane {
void to_json(nlohmann::json& j, const SensorModel& s);
void from_json(const nlohmann::json& j, SensorModel& s);
void to_json(nlohmann::json& j, const WindModel& w);
void from_json(const nlohmann::json& j, WindModel& w);
void to_json(nlohmann::json& j, const FaultSpec& f);
void from_json(const nlohmann::json& j, FaultSpec& f);
}  // namespace cranetwin::crane
