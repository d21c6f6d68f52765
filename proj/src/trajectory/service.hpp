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

#include <functional>

#include "bus/broker.hpp"
#include "model/crane_model.hpp"
#include "trajectory/trajectory.hpp"

namespace cranetwin::trajectory {

// Plans a trajectory from a dt/trajectory/request payload:
//   {request_id, axis?, mode?, p0, p1, v_max?, a_max?, l?, zeta?, dt?}
// Axis limits default to the parameters; zeta defaults to the damping ratio
// matching the swing damping at l. Throws Error(domain) on bad requests.
Trajectory plan_request(const nlohmann::json& request, const model::CraneParameters& params);

// Answers dt/trajectory/request with dt/trajectory/result:
//   {request_id, ok: true, trajectory} or {request_id, ok: false, error: {code, message}}
class TrajectoryService {
 public:
  using ParamsProvider = std::function<model::CraneParameters()>;

  TrajectoryService(bus::Client& client, ParamsProvider params);
  ~TrajectoryService();

 private:
  void on_request(const bus::BusMessage& message);

  bus::Client& client_;
  ParamsProvider params_;
  bus::Subscription sub_;
};

}  // namespace cranetwin::trajectory
