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

#include "json.hpp"

namespace cranetwin::gateway {

struct HttpResponse {
  int status = 0;
  std::string body;

  bool ok() const { return status >= 200 && status < 300; }
  nlohmann::json json() const;
};

// Minimal blocking client for the gateway API. Transport failures throw
// Error(connection); HTTP error statuses are returned, not thrown.
class HttpClient {
 public:
  HttpClient(std::string host, int port, double timeout_seconds = 60.0);
  ~HttpClient();

  HttpResponse get(const std::string& path);
  HttpResponse post(const std::string& path, const nlohmann::json& body = nlohmann::json::object());
  HttpResponse put(const std::string& path, const nlohmann::json& body);
  HttpResponse request(const std::string& method, const std::string& path,
                       const std::string& body = {});

  // Reads a server-sent event stream; returns when on_event returns false or
  // the server closes the stream.
  using EventHandler = std::function<bool(const std::string& event, const std::string& data)>;
  void stream(const std::string& path, const EventHandler& on_event);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cranetwin::gateway
