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

#include <stdexcept>
#include <string>
#include <string_view>

namespace cranetwin {

// Error taxonomy shared by every module. The C API maps these one-to-one onto
// ct_status codes and the gateway maps them onto HTTP status codes.
enum class ErrorCode {
  domain,       // argument outside the accepted domain
  singularity,  // model evaluated at a singular point (rope length <= 0)
  numerical,    // integration produced a non-finite value
  state,        // operation not allowed in the current state
  busy,         // another run is in progress
  not_found,
  conflict,     // duplicate identifier
  protocol,     // malformed topic, pattern or frame
  connection,
  storage,
  timeout,
  internal,
};

std::string_view to_string(ErrorCode code) noexcept;
// Unknown names map to internal.
ErrorCode parse_error_code(std::string_view text) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace cranetwin
