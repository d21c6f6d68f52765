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

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <thread>

#include "json.hpp"

namespace cranetwin::bus {

struct BusMessage {
  std::string topic;
  nlohmann::json payload;
  long long published_at = 0;  // unix microseconds, stamped by the broker
  std::uint64_t seq = 0;       // per-connection delivery counter, starts at 1
};

using MessageHandler = std::function<void(const BusMessage&)>;

// One broker-side connection: a FIFO mailbox drained by its own thread into
// `sink`. Messages still queued when the session closes are dropped.
class Session {
 public:
  explicit Session(MessageHandler sink);
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  void enqueue(BusMessage message);
  void close();
  std::uint64_t delivered() const;

 private:
  void run();

  MessageHandler sink_;
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<BusMessage> mailbox_;
  std::uint64_t next_seq_ = 1;
  std::uint64_t delivered_ = 0;
  bool closed_ = false;
  std::thread worker_;
};

// Topic router. Delivery is at-most-once with no retention; a session
// matching through several patterns receives one copy.
class Broker {
 public:
  Broker() = default;
  Broker(const Broker&) = delete;
  Broker& operator=(const Broker&) = delete;

  std::shared_ptr<Session> attach(MessageHandler sink);
  void detach(const std::shared_ptr<Session>& session);

  void subscribe(const std::shared_ptr<Session>& session, std::string_view pattern);
  void unsubscribe(const std::shared_ptr<Session>& session, std::string_view pattern);

  // Returns the number of sessions the message was queued for.
  std::size_t publish(std::string_view topic, const nlohmann::json& payload);

  std::size_t session_count() const;

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::shared_ptr<Session>, std::set<std::string>> sessions_;
};

namespace detail {
class HandlerRegistry;
}

// RAII subscription; destroying or resetting it unsubscribes. After reset()
// returns the handler is never invoked again.
class Subscription {
 public:
  Subscription() = default;
  Subscription(std::weak_ptr<detail::HandlerRegistry> registry, std::uint64_t id);
  Subscription(Subscription&& other) noexcept;
  Subscription& operator=(Subscription&& other) noexcept;
  ~Subscription();

  void reset();
  bool active() const { return id_ != 0; }

 private:
  std::weak_ptr<detail::HandlerRegistry> registry_;
  std::uint64_t id_ = 0;
};

// Transport-independent client surface used by every service.
class Client {
 public:
  virtual ~Client();

  // Throws Error(protocol) for an invalid topic, Error(connection) when the
  // transport is down.
  virtual void publish(std::string_view topic, const nlohmann::json& payload) = 0;

  // Throws Error(protocol) for a malformed pattern.
  [[nodiscard]] Subscription subscribe(std::string_view pattern, MessageHandler handler);

 protected:
  Client();
  // Transport hooks invoked when a pattern gains its first or loses its last
  // handler.
  virtual void add_pattern(const std::string& pattern) = 0;
  virtual void remove_pattern(const std::string& pattern) = 0;

  void dispatch(const BusMessage& message);
  // Must be called by derived destructors before the transport goes away.
  void detach_registry();

 private:
  std::shared_ptr<detail::HandlerRegistry> registry_;
};

// In-process client attached directly to a Broker.
class LoopbackClient final : public Client {
 public:
  explicit LoopbackClient(Broker& broker);
  ~LoopbackClient() override;

  void publish(std::string_view topic, const nlohmann::json& payload) override;

 protected:
  void add_pattern(const std::string& pattern) override;
  void remove_pattern(const std::string& pattern) override;

 private:
  Broker& broker_;
  std::shared_ptr<Session> session_;
};

}  // namespace cranetwin::bus
