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
#include "sim/service.hpp"

#include "bus/topic.hpp"
#include "common/error.hpp"
#include "io/codec.hpp"

namespace cranetwin::sim {

using nlohmann::json;

namespace {

json error_body(const std::exception& e) {
  const auto* err = dynamic_cast<const Error*>(&e);
  return {{"code", err ? to_string(err->code()) : std::string_view("internal")},
          {"message", e.what()}};
}

PlaybackOptions playback_from(const json& j) {
  PlaybackOptions options;
  const auto decimation = j.value("decimation", std::int64_t{1});
  require(decimation >= 1, ErrorCode::domain, "decimation must be >= 1");
  options.decimation = static_cast<std::size_t>(decimation);
  options.hold = j.value("hold", 0.0);
  return options;
}

}  // namespace

SimulationService::SimulationService(bus::Client& client, historian::Historian* historian,
                                     SettingsProvider settings)
    : client_(client), historian_(historian), settings_(std::move(settings)) {
  started_sub_ = client_.subscribe(bus::topics::run_started,
                                   [this](const bus::BusMessage& m) { on_run_started(m); });
  request_sub_ = client_.subscribe(bus::topics::simulation_request,
                                   [this](const bus::BusMessage& m) { on_request(m); });
}

SimulationService::~SimulationService() {
  started_sub_.reset();
  request_sub_.reset();
  drain();
}

void SimulationService::drain() {
  std::list<std::future<void>> jobs;
  {
    std::lock_guard lock(jobs_mutex_);
    jobs.swap(jobs_);
  }
  for (auto& job : jobs) job.wait();
}

void SimulationService::launch(std::function<void()> job) {
  std::lock_guard lock(jobs_mutex_);
  jobs_.remove_if([](const std::future<void>& f) {
    return f.wait_for(std::chrono::seconds(0)) == std::future_status::ready;
  });
  jobs_.push_back(std::async(std::launch::async, std::move(job)));
}

void SimulationService::publish(const json& payload) {
  try {
    client_.publish(bus::topics::simulation_result, payload);
  } catch (const Error&) {
  }
}

void SimulationService::on_run_started(const bus::BusMessage& message) {
  const json payload = message.payload;
  const SimulationSettings settings = settings_();
  launch([this, payload, settings] {
    const std::string run_id = payload.value("run_id", "");
    try {
      const auto traj = payload.at("trajectory").get<trajectory::Trajectory>();
      const auto initial = payload.at("initial").get<model::CraneState>();
      const double dt = payload.value("plant_dt", traj.dt);
      const PlaybackOptions options = playback_from(payload);

      Trace nominal = simulate(traj, settings.params, initial, dt, options);
      auto [lower, upper] =
          confidence_envelope(traj, settings.params, initial, dt, settings.envelope, options);
      nominal.id = lower.id = upper.id = run_id;
      if (historian_) {
        historian_->write_trace(run_id, nominal);
        historian_->write_trace(run_id, lower);
        historian_->write_trace(run_id, upper);
      }
      publish({{"run_id", run_id},
               {"ok", true},
               {"samples", nominal.samples.size()},
               {"dt", nominal.dt},
               {"ensemble_size", settings.envelope.ensemble_size}});
    } catch (const std::exception& e) {
      publish({{"run_id", run_id}, {"ok", false}, {"error", error_body(e)}});
    }
  });
}

// dt/simulation/request: {request_id, trajectory, initial?, dt?, decimation?,
// hold?, params?, envelope?: bool}. Traces are returned inline.
void SimulationService::on_request(const bus::BusMessage& message) {
  const json payload = message.payload;
  const SimulationSettings settings = settings_();
  launch([this, payload, settings] {
    json result{{"request_id", payload.value("request_id", "")}};
    try {
      const auto traj = payload.at("trajectory").get<trajectory::Trajectory>();
      model::CraneParameters params = settings.params;
      if (payload.contains("params")) payload.at("params").get_to(params);
      params.validate();
      model::CraneState initial;
      if (traj.axis == trajectory::Axis::cart)
        initial.x = traj.start_pos();
      else
        initial.l = traj.start_pos();
      if (payload.contains("initial")) payload.at("initial").get_to(initial);
      const double dt = payload.value("dt", traj.dt);
      const PlaybackOptions options = playback_from(payload);

      Trace nominal = simulate(traj, params, initial, dt, options);
      result["simulated"] = nominal;
      if (payload.value("envelope", true)) {
        auto [lower, upper] =
            confidence_envelope(traj, params, initial, dt, settings.envelope, options);
        lower.id = upper.id = nominal.id;
        result["envelope_lower"] = lower;
        result["envelope_upper"] = upper;
      }
      result["ok"] = true;
    } catch (const std::exception& e) {
      result["ok"] = false;
      result["error"] = error_body(e);
    }
    publish(result);
  });
}

}  // namespace cranetwin::sim
