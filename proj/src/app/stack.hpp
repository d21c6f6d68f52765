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
#include <memory>
#include <string>

#include "app/config.hpp"
#include "bus/broker.hpp"
#include "bus/tcp.hpp"
#include "crane/virtual_crane.hpp"
#include "gateway/gateway.hpp"
#include "historian/historian.hpp"
#include "sim/service.hpp"
#include "trajectory/service.hpp"
#include "validation/validator.hpp"

namespace cranetwin::app {

// The whole twin in one process: historian, broker (with its TCP listener),
// trajectory, simulation and validation services, the virtual crane and the
// gateway. Services talk to each other only over the broker.
class Stack {
 public:
  using ReadyCallback = std::function<void(const std::string& line)>;

  // Starts every service; `on_ready` receives one line per service. Throws
  // Error(connection) naming the port when a listener cannot bind.
  explicit Stack(StackConfig config, const ReadyCallback& on_ready = {});
  ~Stack();
  Stack(const Stack&) = delete;
  Stack& operator=(const Stack&) = delete;

  void stop();

  int broker_port() const { return tcp_->port(); }
  int gateway_port() const { return gateway_->port(); }

  crane::VirtualCrane& crane() { return *crane_; }
  historian::Historian& historian() { return *historian_; }
  bus::Broker& broker() { return *broker_; }
  RuntimeConfig& config() { return *config_; }

 private:
  std::unique_ptr<historian::Historian> historian_;
  std::unique_ptr<RuntimeConfig> config_;
  std::unique_ptr<bus::Broker> broker_;
  std::unique_ptr<bus::TcpServer> tcp_;
  std::unique_ptr<bus::LoopbackClient> trajectory_client_;
  std::unique_ptr<bus::LoopbackClient> simulation_client_;
  std::unique_ptr<bus::LoopbackClient> validation_client_;
  std::unique_ptr<bus::LoopbackClient> crane_client_;
  std::unique_ptr<bus::LoopbackClient> gateway_client_;
  std::unique_ptr<trajectory::TrajectoryService> trajectory_;
  std::unique_ptr<sim::SimulationService> simulation_;
  std::unique_ptr<validation::ValidationService> validation_;
  std::unique_ptr<crane::VirtualCrane> crane_;
  std::unique_ptr<gateway::Gateway> gateway_;
};

}  // namespace cranetwin::app
