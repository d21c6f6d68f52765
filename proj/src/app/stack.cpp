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
#include "app/stack.hpp"

#include <filesystem>
#include <sstream>

#include "common/error.hpp"

namespace cranetwin::app {

Stack::Stack(StackConfig config, const ReadyCallback& on_ready) {
  auto ready = [&](const std::string& line) {
    if (on_ready) on_ready(line);
  };
  config.validate();
  std::filesystem::create_directories(config.data_dir);

  historian_ = std::make_unique<historian::Historian>(config.data_dir, config.logger);
  config_ = std::make_unique<RuntimeConfig>(config, historian_.get());
  config_->load_overrides();
  ready("historian: ready at " + std::filesystem::absolute(config.data_dir).string());

  if (config_->snapshot().thresholds.empty()) {
    const StackConfig current = config_->snapshot();
    config_->set_thresholds(
        validation::calibrated_thresholds(calibration_metrics(current), current.threshold_multiplier));
    ready("validation: thresholds calibrated at " + std::to_string(current.threshold_multiplier) +
          "x the nominal calibration run");
  }

  broker_ = std::make_unique<bus::Broker>();
  tcp_ = std::make_unique<bus::TcpServer>(*broker_, config.broker.host,
                                          static_cast<std::uint16_t>(config.broker.port));
  ready("broker: listening on " + config.broker.host + ":" + std::to_string(tcp_->port()));

  RuntimeConfig& rc = *config_;
  trajectory_client_ = std::make_unique<bus::LoopbackClient>(*broker_);
  trajectory_ = std::make_unique<trajectory::TrajectoryService>(
      *trajectory_client_, [&rc] { return rc.snapshot().params; });
  ready("trajectory: ready");

  simulation_client_ = std::make_unique<bus::LoopbackClient>(*broker_);
  simulation_ = std::make_unique<sim::SimulationService>(
      *simulation_client_, historian_.get(), [&rc] { return rc.snapshot().simulation_settings(); });
  ready("simulation: ready");

  validation_client_ = std::make_unique<bus::LoopbackClient>(*broker_);
  validation_ = std::make_unique<validation::ValidationService>(
      *validation_client_, *historian_, [&rc] { return rc.snapshot().validation_settings(); });
  ready("validation: ready");

  crane_client_ = std::make_unique<bus::LoopbackClient>(*broker_);
  crane_ = std::make_unique<crane::VirtualCrane>(config.crane_config(), *crane_client_,
                                                 historian_.get());
  std::ostringstream scale;
  scale << config.time_scale;
  ready("crane: ready (time_scale " + scale.str() + ")");

  gateway_client_ = std::make_unique<bus::LoopbackClient>(*broker_);
  gateway::GatewayOptions options;
  options.host = config.gateway.host;
  options.port = config.gateway.port;
  options.static_dir = config.static_dir;
  options.heartbeat_period = config.heartbeat_period;
  options.stream_buffer = config.stream_buffer;
  gateway_ = std::make_unique<gateway::Gateway>(*crane_, *historian_, *config_, *gateway_client_,
                                                options);
  ready("gateway: listening on http://" + config.gateway.host + ":" +
        std::to_string(gateway_->port()));
}

Stack::~Stack() { stop(); }

void Stack::stop() {
  if (gateway_) gateway_->stop();
  gateway_.reset();
  crane_.reset();
  validation_.reset();
  simulation_.reset();
  trajectory_.reset();
  gateway_client_.reset();
  crane_client_.reset();
  validation_client_.reset();
  simulation_client_.reset();
  trajectory_client_.reset();
  if (tcp_) tcp_->stop();
  tcp_.reset();
  if (historian_) historian_->flush();
}

}  // namespace cranetwin::app
