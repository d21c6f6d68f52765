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
#include <future>
#include <list>
#include <mutex>

#include "bus/broker.hpp"
#include "historian/historian.hpp"
#include "model/crane_model.hpp"
#include "sim/simulation.hpp"

namespace cranetwin::sim {

struct SimulationSettings {
  model::CraneParameters params;
  EnvelopeConfig envelope;
};

// Simulates every started run (crane/run/started) and every explicit
// dt/simulation/request. Run traces go to the historian; both paths answer on
// dt/simulation/result. Each job runs on its own worker.
class SimulationService {
 public:
  using SettingsProvider = std::function<SimulationSettings()>;

  // `historian` may be null; run results are then only published.
  SimulationService(bus::Client& client, historian::Historian* historian,
                    SettingsProvider settings);
  ~SimulationService();

  // Blocks until every job launched so far has finished.
  void drain();

 private:
  void on_run_started(const bus::BusMessage& message);
  void on_request(const bus::BusMessage& message);
  void launch(std::function<void()> job);
  void publish(const nlohmann::json& payload);

  bus::Client& client_;
  historian::Historian* historian_;
  SettingsProvider settings_;
  std::mutex jobs_mutex_;
  std::list<std::future<void>> jobs_;
  bus::Subscription started_sub_;
  bus::Subscription request_sub_;
};

}  // namespace cranetwin::sim
