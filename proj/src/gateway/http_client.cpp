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
#include "gateway/http_client.hpp"

#include <cmath>

#include "common/error.hpp"
#include "httplib.h"

namespace cranetwin::gateway {

nlohmann::json HttpResponse::json() const {
  auto parsed = nlohmann::json::parse(body, nullptr, false);
  if (parsed.is_discarded()) fail(ErrorCode::protocol, "response body is not valid JSON");
  return parsed;
}

struct HttpClient::Impl {
  std::string host;
  int port;
  httplib::Client client;

  Impl(std::string h, int p, double timeout) : host(std::move(h)), port(p), client(host, port) {
    const auto sec = static_cast<time_t>(std::floor(timeout));
    const auto usec = static_cast<time_t>((timeout - static_cast<double>(sec)) * 1e6);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);
  }

  HttpResponse take(const httplib::Result& result, const std::string& what) {
    if (!result)
      fail(ErrorCode::connection, "cannot reach gateway at " + host + ":" + std::to_string(port) +
                                      " (" + httplib::to_string(result.error()) + ") during " +
                                      what);
    return {result->status, result->body};
  }
};

HttpClient::HttpClient(std::string host, int port, double timeout_seconds)
    : impl_(std::make_unique<Impl>(std::move(host), port, timeout_seconds)) {}

HttpClient::~HttpClient() = default;

HttpResponse HttpClient::get(const std::string& path) {
  return impl_->take(impl_->client.Get(path), "GET " + path);
}

HttpResponse HttpClient::post(const std::string& path, const nlohmann::json& body) {
  return impl_->take(impl_->client.Post(path, body.dump(), "application/json"), "POST " + path);
}

HttpResponse HttpClient::put(const std::string& path, const nlohmann::json& body) {
  return impl_->take(impl_->client.Put(path, body.dump(), "application/json"), "PUT " + path);
}

HttpResponse HttpClient::request(const std::string& method, const std::string& path,
                                 const std::string& body) {
  if (method == "GET") return impl_->take(impl_->client.Get(path), "GET " + path);
  if (method == "POST")
    return impl_->take(impl_->client.Post(path, body, "application/json"), "POST " + path);
  if (method == "PUT")
    return impl_->take(impl_->client.Put(path, body, "application/json"), "PUT " + path);
  if (method == "DELETE") return impl_->take(impl_->client.Delete(path), "DELETE " + path);
  fail(ErrorCode::domain, "unsupported HTTP method '" + method + "'");
}

void HttpClient::stream(const std::string& path, const EventHandler& on_event) {
  std::string buffer;
  bool keep_going = true;
  auto result = impl_->client.Get(path, [&](const char* data, std::size_t size) {
    buffer.append(data, size);
    std::size_t end;
    while (keep_going && (end = buffer.find("\n\n")) != std::string::npos) {
      const std::string block = buffer.substr(0, end);
      buffer.erase(0, end + 2);
      std::string event = "message", payload;
      std::size_t pos = 0;
      while (pos <= block.size()) {
        std::size_t nl = block.find('\n', pos);
        if (nl == std::string::npos) nl = block.size();
        const std::string line = block.substr(pos, nl - pos);
        if (line.rfind("event: ", 0) == 0) event = line.substr(7);
        else if (line.rfind("data: ", 0) == 0) payload += line.substr(6);
        pos = nl + 1;
      }
      keep_going = on_event(event, payload);
    }
    return keep_going;
  });
  if (!result && keep_going && result.error() != httplib::Error::Canceled)
    fail(ErrorCode::connection, "event stream " + path + " failed: " +
                                    httplib::to_string(result.error()));
}

}  // namespace cranetwin::gateway
