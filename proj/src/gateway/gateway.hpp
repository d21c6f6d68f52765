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

#include <memory>
#include <string>
#include <string_view>

#include "app/config.hpp"
#include "bus/broker.hpp"
#include "common/error.hpp"
#include "crane/virtual_crane.hpp"
#include "historian/historian.hpp"

namespace cranetwin::gateway {

// HTTP/1.1 front door for the HMI and the CLI.
//
//   POST /api/move {target_x, mode}   POST /api/hoist {target_l}
//   POST /api/home   POST /api/zero   POST /api/magnet {on}   POST /api/faults {FaultSpec}
//   GET  /api/status   GET /api/runs   GET /api/runs/{id}
//   GET  /api/runs/{id}/trace?kind=&from=&to=   GET /api/runs/{id}/validation
//   GET|PUT /api/config
//   GET  /api/stream   server-sent events: state, alert, heartbeat
//
// Errors are {"code", "message"} with code one of bad_request (400),
// not_found (404), conflict (409), state_error (409), internal (500).
//
// Each stream client has a bounded queue; when it is full the oldest event
// is dropped so a slow reader never stalls the crane.
struct GatewayOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 = any free port
  std::string static_dir;
  double heartbeat_period = 5.0;
  std::size_t stream_buffer = 256;
  int worker_threads = 16;
};

int http_status(ErrorCode code) noexcept;
std::string_view api_code(ErrorCode code) noexcept;

class Gateway {
 public:
  // Binds immediately; throws Error(connection) naming the port when it is
  // not available.
  Gateway(crane::VirtualCrane& crane, historian::Historian& historian,
          app::RuntimeConfig& config, bus::Client& client, GatewayOptions options);
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  int port() const;
  std::size_t stream_clients() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cranetwin::gateway
