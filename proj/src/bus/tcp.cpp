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

#include "bus/tcp.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <optional>

#include "bus/topic.hpp"
#include "common/error.hpp"

namespace cranetwin::bus {

namespace {

constexpr std::size_t kMaxFrame = 64u << 20;

sockaddr_in resolve(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  if (::getaddrinfo(host.c_str(), nullptr, &hints, &found) != 0 || found == nullptr)
    fail(ErrorCode::connection, "cannot resolve host '" + host + "'");
  sockaddr_in addr = *reinterpret_cast<sockaddr_in*>(found->ai_addr);
  ::freeaddrinfo(found);
  addr.sin_port = htons(port);
  return addr;
}

bool send_all(int fd, const std::string& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

// Buffered reader returning one '\n'-terminated line at a time.
class LineReader {
 public:
  explicit LineReader(int fd) : fd_(fd) {}

  std::optional<std::string> next() {
    while (true) {
      const std::size_t nl = buffer_.find('\n', scanned_);
      if (nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        scanned_ = 0;
        return line;
      }
      scanned_ = buffer_.size();
      if (buffer_.size() > kMaxFrame) return std::nullopt;
      char chunk[8192];
      const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) return std::nullopt;
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int fd_;
  std::string buffer_;
  std::size_t scanned_ = 0;
};

std::string frame_line(const nlohmann::json& frame) {
  return frame.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

}  // namespace

// ---------------------------------------------------------------- server

struct TcpServer::Connection {
  int fd = -1;
  std::mutex write_mutex;
  std::shared_ptr<Session> session;
  std::thread reader;
  std::atomic<bool> finished{false};

  void write(const nlohmann::json& frame) {
    const std::string line = frame_line(frame);
    std::lock_guard lock(write_mutex);
    send_all(fd, line);
  }
};

TcpServer::TcpServer(Broker& broker, const std::string& host, std::uint16_t port)
    : broker_(broker) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) fail(ErrorCode::connection, "cannot create socket");
  const int yes = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr = resolve(host, port);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(listen_fd_, 64) != 0) {
    const std::string reason = std::strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    fail(ErrorCode::connection,
         "broker cannot listen on " + host + ":" + std::to_string(port) + ": " + reason);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  acceptor_ = std::thread([this] { accept_loop(); });
}

TcpServer::~TcpServer() { stop(); }

std::size_t TcpServer::connection_count() const {
  std::lock_guard lock(mutex_);
  std::size_t live = 0;
  for (const auto& c : connections_) live += c->finished ? 0 : 1;
  return live;
}

void TcpServer::stop() {
  if (stopping_.exchange(true)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  if (acceptor_.joinable()) acceptor_.join();
  std::list<std::shared_ptr<Connection>> connections;
  {
    std::lock_guard lock(mutex_);
    connections.swap(connections_);
  }
  for (auto& c : connections) {
    ::shutdown(c->fd, SHUT_RDWR);
    if (c->reader.joinable()) c->reader.join();
  }
}

void TcpServer::accept_loop() {
  while (!stopping_) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      return;
    }
    const int yes = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &yes, sizeof yes);

    auto connection = std::make_shared<Connection>();
    connection->fd = fd;
    std::weak_ptr<Connection> weak = connection;
    connection->session = broker_.attach([weak](const BusMessage& m) {
      if (auto c = weak.lock())
        c->write({{"op", "msg"},
                  {"topic", m.topic},
                  {"payload", m.payload},
                  {"seq", m.seq},
                  {"published_at", m.published_at}});
    });

    std::lock_guard lock(mutex_);
    // Reap finished connections.
    for (auto it = connections_.begin(); it != connections_.end();) {
      if ((*it)->finished) {
        if ((*it)->reader.joinable()) (*it)->reader.join();
        it = connections_.erase(it);
      } else {
        ++it;
      }
    }
    connections_.push_back(connection);
    connection->reader = std::thread([this, connection] { serve(connection); });
  }
}

void TcpServer::serve(const std::shared_ptr<Connection>& connection) {
  LineReader reader(connection->fd);
  while (auto line = reader.next()) {
    if (line->empty()) continue;
    try {
      const auto frame = nlohmann::json::parse(*line);
      const std::string op = frame.at("op").get<std::string>();
      if (op == "sub") {
        broker_.subscribe(connection->session, frame.at("pattern").get<std::string>());
      } else if (op == "unsub") {
        broker_.unsubscribe(connection->session, frame.at("pattern").get<std::string>());
      } else if (op == "pub") {
        broker_.publish(frame.at("topic").get<std::string>(),
                        frame.contains("payload") ? frame["payload"] : nlohmann::json());
      } else {
        connection->write({{"op", "error"}, {"message", "unknown op '" + op + "'"}});
      }
    } catch (const std::exception& e) {
      connection->write({{"op", "error"}, {"message", e.what()}});
    }
  }
  broker_.detach(connection->session);
  connection->session->close();
  ::shutdown(connection->fd, SHUT_RDWR);
  ::close(connection->fd);
  connection->finished = true;
}

// ---------------------------------------------------------------- client

TcpClient::TcpClient(const std::string& host, std::uint16_t port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) fail(ErrorCode::connection, "cannot create socket");
  sockaddr_in addr = resolve(host, port);
  if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    const std::string reason = std::strerror(errno);
    ::close(fd_);
    fd_ = -1;
    fail(ErrorCode::connection,
         "cannot connect to broker at " + host + ":" + std::to_string(port) + ": " + reason);
  }
  const int yes = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &yes, sizeof yes);
  connected_ = true;
  reader_ = std::thread([this] { read_loop(); });
}

TcpClient::~TcpClient() {
  detach_registry();
  close();
}

void TcpClient::close() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
  if (reader_.joinable()) {
    if (reader_.get_id() == std::this_thread::get_id())
      reader_.detach();
    else
      reader_.join();
  }
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
  connected_ = false;
}

void TcpClient::publish(std::string_view topic, const nlohmann::json& payload) {
  check_topic(topic);
  send_frame({{"op", "pub"}, {"topic", topic}, {"payload", payload}});
}

void TcpClient::add_pattern(const std::string& pattern) {
  send_frame({{"op", "sub"}, {"pattern", pattern}});
}

void TcpClient::remove_pattern(const std::string& pattern) {
  send_frame({{"op", "unsub"}, {"pattern", pattern}});
}

void TcpClient::send_frame(const nlohmann::json& frame) {
  if (!connected_) fail(ErrorCode::connection, "not connected to broker");
  const std::string line = frame_line(frame);
  std::lock_guard lock(write_mutex_);
  if (!send_all(fd_, line)) {
    connected_ = false;
    fail(ErrorCode::connection, "broker connection lost");
  }
}

void TcpClient::read_loop() {
  LineReader reader(fd_);
  while (auto line = reader.next()) {
    if (line->empty()) continue;
    try {
      const auto frame = nlohmann::json::parse(*line);
      if (frame.value("op", "") != "msg") continue;
      BusMessage message;
      message.topic = frame.at("topic").get<std::string>();
      message.payload = frame.value("payload", nlohmann::json());
      message.seq = frame.value("seq", std::uint64_t{0});
      message.published_at = frame.value("published_at", 0LL);
      dispatch(message);
    } catch (...) {
      // Malformed frames and failing handlers are dropped (at-most-once).
    }
  }
  connected_ = false;
}

}  // namespace cranetwin::bus
