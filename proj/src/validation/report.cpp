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

#include "validation/report.hpp"

#include "common/error.hpp"

namespace cranetwin::validation {

std::string_view to_string(Signal signal) noexcept {
  switch (signal) {
    case Signal::x: return "x";
    case Signal::theta: return "theta";
    case Signal::l: return "l";
  }
  return "x";
}

std::string_view to_string(Metric metric) noexcept {
  switch (metric) {
    case Metric::rmse: return "rmse";
    case Metric::max_dev: return "max_dev";
    case Metric::dtw: return "dtw";
  }
  return "rmse";
}

Signal parse_signal(std::string_view text) {
  if (text == "x") return Signal::x;
  if (text == "theta") return Signal::theta;
  if (text == "l") return Signal::l;
  fail(ErrorCode::domain, "unknown signal '" + std::string(text) + "'");
}

Metric parse_metric(std::string_view text) {
  if (text == "rmse") return Metric::rmse;
  if (text == "max_dev") return Metric::max_dev;
  if (text == "dtw") return Metric::dtw;
  fail(ErrorCode::domain, "unknown metric '" + std::string(text) + "'");
}

}  // namespace cranetwin::validation
