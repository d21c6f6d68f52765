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

// Line-framed TCP transport for the broker. Every frame is one JSON object on
// a single '\n'-terminated UTF-8 line:
//
//   client -> server  {"op":"sub","pattern":P}
//                     {"op":"unsub","pattern":P}
//                     {"op":"pub","topic":T,"payload":X}
//   server -> client  {"op":"msg","topic":T,"payload":X,"seq":N,"published_at":US}
//                     {"op":"error","message":M}   (malformed frame; connection stays up)

#include <atomic>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "bus/broker.hpp"

namespace cranetwin::bus {

class TcpServer {
 public:
  // Binds and listens immediately; throws Error(connection) naming the port
  // when the address is unavailable. Port 0 picks an ephemeral port.
  TcpServer(Broker& broker, const std::string& host, std::uint16_t port);
  ~TcpServer();
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  std::uint16_t port() const { return port_; }
  std::size_t connection_count() const;
  void stop();

 private:
  struct Connection;

  void accept_loop();
  void serve(const std::shared_ptr<Connection>& connection);

  Broker& broker_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  mutable std::mutex mutex_;
  std::list<std::shared_ptr<Connection>> connections_;
};

class TcpClient final : public Client {
 public:
  // Throws Error(connection) if the broker cannot be reached.
  TcpClient(const std::string& host, std::uint16_t port);
  ~TcpClient() override;

  void publish(std::string_view topic, const nlohmann::json& payload) override;
  bool connected() const { return connected_; }
  void close();

 protected:
  void add_pattern(const std::string& pattern) override;
  void remove_pattern(const std::string& pattern) override;

 private:
  void send_frame(const nlohmann::json& frame);
  void read_loop();

  int fd_ = -1;
  std::atomic<bool> connected_{false};
  std::mutex write_mutex_;
  std::thread reader_;
};

}  // namespace cranetwin::bus
