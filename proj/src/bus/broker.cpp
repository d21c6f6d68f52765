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

#include "bus/broker.hpp"

#include <vector>

#include "bus/topic.hpp"
#include "common/error.hpp"
#include "common/util.hpp"

namespace cranetwin::bus {

// ---------------------------------------------------------------- Session

Session::Session(MessageHandler sink) : sink_(std::move(sink)) {
  worker_ = std::thread([this] { run(); });
}

Session::~Session() { close(); }

void Session::enqueue(BusMessage message) {
  {
    std::lock_guard lock(mutex_);
    if (closed_) return;
    message.seq = next_seq_++;
    mailbox_.push_back(std::move(message));
  }
  cv_.notify_one();
}

void Session::close() {
  {
    std::lock_guard lock(mutex_);
    closed_ = true;
    mailbox_.clear();
  }
  cv_.notify_all();
  if (worker_.joinable()) {
    if (worker_.get_id() == std::this_thread::get_id())
      worker_.detach();
    else
      worker_.join();
  }
}

std::uint64_t Session::delivered() const {
  std::lock_guard lock(mutex_);
  return delivered_;
}

void Session::run() {
  while (true) {
    BusMessage message;
    {
      std::unique_lock lock(mutex_);
      cv_.wait(lock, [this] { return closed_ || !mailbox_.empty(); });
      if (closed_) return;
      message = std::move(mailbox_.front());
      mailbox_.pop_front();
    }
    try {
      sink_(message);
    } catch (...) {
      // A failing subscriber must not take the connection down.
    }
    std::lock_guard lock(mutex_);
    ++delivered_;
  }
}

// ---------------------------------------------------------------- Broker

std::shared_ptr<Session> Broker::attach(MessageHandler sink) {
  auto session = std::make_shared<Session>(std::move(sink));
  std::unique_lock lock(mutex_);
  sessions_.emplace(session, std::set<std::string>{});
  return session;
}

void Broker::detach(const std::shared_ptr<Session>& session) {
  std::unique_lock lock(mutex_);
  sessions_.erase(session);
}

void Broker::subscribe(const std::shared_ptr<Session>& session, std::string_view pattern) {
  check_pattern(pattern);
  std::unique_lock lock(mutex_);
  auto it = sessions_.find(session);
  if (it == sessions_.end()) fail(ErrorCode::connection, "session is not attached");
  it->second.emplace(pattern);
}

void Broker::unsubscribe(const std::shared_ptr<Session>& session, std::string_view pattern) {
  std::unique_lock lock(mutex_);
  auto it = sessions_.find(session);
  if (it != sessions_.end()) it->second.erase(std::string(pattern));
}

std::size_t Broker::publish(std::string_view topic, const nlohmann::json& payload) {
  check_topic(topic);
  BusMessage message{std::string(topic), payload, unix_micros(), 0};
  std::size_t queued = 0;
  std::shared_lock lock(mutex_);
  for (const auto& [session, patterns] : sessions_) {
    for (const std::string& pattern : patterns) {
      if (match(pattern, topic)) {
        session->enqueue(message);
        ++queued;
        break;
      }
    }
  }
  return queued;
}

std::size_t Broker::session_count() const {
  std::shared_lock lock(mutex_);
  return sessions_.size();
}

// ---------------------------------------------------------------- handlers

namespace detail {

class HandlerRegistry {
 public:
  using Hook = std::function<void(const std::string&)>;

  HandlerRegistry(Hook on_add, Hook on_remove)
      : on_add_(std::move(on_add)), on_remove_(std::move(on_remove)) {}

  std::uint64_t add(const std::string& pattern, MessageHandler handler) {
    std::lock_guard lock(mutex_);
    if (!on_add_) fail(ErrorCode::connection, "client is closed");
    const std::uint64_t id = next_id_++;
    const bool first = count(pattern) == 0;
    entries_.emplace(id, Entry{pattern, std::make_shared<MessageHandler>(std::move(handler))});
    if (first) {
      try {
        on_add_(pattern);
      } catch (...) {
        entries_.erase(id);
        throw;
      }
    }
    return id;
  }

  void remove(std::uint64_t id) {
    std::lock_guard dispatching(dispatch_mutex_);
    std::lock_guard lock(mutex_);
    auto it = entries_.find(id);
    if (it == entries_.end()) return;
    const std::string pattern = it->second.pattern;
    entries_.erase(it);
    if (count(pattern) == 0 && on_remove_) {
      try {
        on_remove_(pattern);
      } catch (...) {
        // The transport is gone; nothing left to unsubscribe from.
      }
    }
  }

  void dispatch(const BusMessage& message) {
    std::lock_guard dispatching(dispatch_mutex_);
    std::vector<std::pair<std::uint64_t, std::shared_ptr<MessageHandler>>> targets;
    {
      std::lock_guard lock(mutex_);
      for (const auto& [id, entry] : entries_)
        if (match(entry.pattern, message.topic)) targets.emplace_back(id, entry.handler);
    }
    for (const auto& [id, handler] : targets) {
      {
        // A handler may have unsubscribed an earlier target in this batch.
        std::lock_guard lock(mutex_);
        if (!entries_.contains(id)) continue;
      }
      (*handler)(message);
    }
  }

  void detach() {
    std::lock_guard dispatching(dispatch_mutex_);
    std::lock_guard lock(mutex_);
    entries_.clear();
    on_add_ = nullptr;
    on_remove_ = nullptr;
  }

 private:
  struct Entry {
    std::string pattern;
    std::shared_ptr<MessageHandler> handler;
  };

  std::size_t count(const std::string& pattern) const {
    std::size_t n = 0;
    for (const auto& [id, entry] : entries_) n += entry.pattern == pattern ? 1 : 0;
    return n;
  }

  std::recursive_mutex dispatch_mutex_;
  std::mutex mutex_;
  Hook on_add_;
  Hook on_remove_;
  std::map<std::uint64_t, Entry> entries_;
  std::uint64_t next_id_ = 1;
};

}  // namespace detail

// ---------------------------------------------------------------- Subscription

Subscription::Subscription(std::weak_ptr<detail::HandlerRegistry> registry, std::uint64_t id)
    : registry_(std::move(registry)), id_(id) {}

Subscription::Subscription(Subscription&& other) noexcept
    : registry_(std::move(other.registry_)), id_(std::exchange(other.id_, 0)) {}

Subscription& Subscription::operator=(Subscription&& other) noexcept {
  if (this != &other) {
    reset();
    registry_ = std::move(other.registry_);
    id_ = std::exchange(other.id_, 0);
  }
  return *this;
}

Subscription::~Subscription() { reset(); }

void Subscription::reset() {
  if (id_ == 0) return;
  if (auto registry = registry_.lock()) registry->remove(id_);
  id_ = 0;
  registry_.reset();
}

// ---------------------------------------------------------------- Client

Client::Client()
    : registry_(std::make_shared<detail::HandlerRegistry>(
          [this](const std::string& p) { add_pattern(p); },
          [this](const std::string& p) { remove_pattern(p); })) {}

Client::~Client() { detach_registry(); }

Subscription Client::subscribe(std::string_view pattern, MessageHandler handler) {
  check_pattern(pattern);
  const std::uint64_t id = registry_->add(std::string(pattern), std::move(handler));
  return Subscription(registry_, id);
}

void Client::dispatch(const BusMessage& message) { registry_->dispatch(message); }

void Client::detach_registry() { registry_->detach(); }

// ---------------------------------------------------------------- Loopback

LoopbackClient::LoopbackClient(Broker& broker) : broker_(broker) {
  session_ = broker_.attach([this](const BusMessage& message) { dispatch(message); });
}

LoopbackClient::~LoopbackClient() {
  broker_.detach(session_);
  detach_registry();
  session_->close();
}

void LoopbackClient::publish(std::string_view topic, const nlohmann::json& payload) {
  broker_.publish(topic, payload);
}

void LoopbackClient::add_pattern(const std::string& pattern) { broker_.subscribe(session_, pattern); }

void LoopbackClient::remove_pattern(const std::string& pattern) {
  broker_.unsubscribe(session_, pattern);
}

}  // namespace cranetwin::bus
