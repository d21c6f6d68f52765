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
#include "trajectory/service.hpp"

#include "bus/topic.hpp"
#include "common/error.hpp"
#include "io/codec.hpp"

namespace cranetwin::trajectory {

using nlohmann::json;

namespace {

double number(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(ErrorCode::domain, std::string("missing field '") + key + "'");
  if (!it->is_number()) fail(ErrorCode::domain, std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

}  // namespace

Trajectory plan_request(const json& request, const model::CraneParameters& params) {
  require(request.is_object(), ErrorCode::domain, "request must be an object");
  const Axis axis = parse_axis(request.value("axis", "cart"));
  const Mode mode = parse_mode(request.value("mode", "trapezoid"));
  const double p0 = number(request, "p0");
  const double p1 = number(request, "p1");
  const double dt = number_or(request, "dt", 1e-3);
  const bool cart = axis == Axis::cart;
  const double v_max = number_or(request, "v_max", cart ? params.cart_v_max : params.hoist_v_max);
  const double a_max = number_or(request, "a_max", cart ? params.cart_a_max : params.hoist_a_max);

  if (cart) {
    require(p1 >= 0.0 && p1 <= params.cart_travel_max, ErrorCode::domain,
            "p1 outside the cart travel");
  } else {
    require(p1 >= params.rope_length_min && p1 <= params.rope_length_max, ErrorCode::domain,
            "p1 outside the rope limits");
    require(mode == Mode::trapezoid, ErrorCode::domain, "hoist moves are planned as trapezoids");
  }

  Trajectory traj;
  if (mode == Mode::zv_shaped) {
    const double l = number(request, "l");
    const double zeta = number_or(request, "zeta", damping_ratio_for(l, params));
    traj = plan_zv_shaped(p0, p1, v_max, a_max, l, zeta, dt, params);
  } else {
    traj = plan_trapezoid(p0, p1, v_max, a_max, dt);
  }
  traj.axis = axis;
  return traj;
}

TrajectoryService::TrajectoryService(bus::Client& client, ParamsProvider params)
    : client_(client), params_(std::move(params)) {
  sub_ = client_.subscribe(bus::topics::trajectory_request,
                           [this](const bus::BusMessage& m) { on_request(m); });
}

TrajectoryService::~TrajectoryService() { sub_.reset(); }

void TrajectoryService::on_request(const bus::BusMessage& message) {
  json result{{"request_id", message.payload.value("request_id", "")}};
  try {
    result["trajectory"] = plan_request(message.payload, params_());
    result["ok"] = true;
  } catch (const Error& e) {
    result["ok"] = false;
    result["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
  } catch (const std::exception& e) {
    result["ok"] = false;
    result["error"] = {{"code", "internal"}, {"message", e.what()}};
  }
  try {
    client_.publish(bus::topics::trajectory_result, result);
  } catch (const Error&) {
  }
}

}  // namespace cranetwin::trajectory
