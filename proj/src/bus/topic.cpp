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

#include "bus/topic.hpp"

#include <string>
#include <vector>

#include "common/error.hpp"

namespace cranetwin::bus {

namespace {

std::vector<std::string_view> split(std::string_view text) {
  std::vector<std::string_view> levels;
  std::size_t start = 0;
  while (true) {
    const std::size_t slash = text.find('/', start);
    if (slash == std::string_view::npos) {
      levels.push_back(text.substr(start));
      return levels;
    }
    levels.push_back(text.substr(start, slash - start));
    start = slash + 1;
  }
}

}  // namespace

bool is_valid_topic(std::string_view topic) noexcept {
  if (topic.empty()) return false;
  for (std::string_view level : split(topic)) {
    if (level.empty()) return false;
    if (level.find_first_of("+#") != std::string_view::npos) return false;
  }
  return topic.find('\n') == std::string_view::npos;
}

bool is_valid_pattern(std::string_view pattern) noexcept {
  if (pattern.empty() || pattern.find('\n') != std::string_view::npos) return false;
  const auto levels = split(pattern);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const std::string_view level = levels[i];
    if (level.empty()) return false;
    if (level == "#") {
      if (i + 1 != levels.size()) return false;
      continue;
    }
    if (level == "+") continue;
    if (level.find_first_of("+#") != std::string_view::npos) return false;
  }
  return true;
}

void check_topic(std::string_view topic) {
  if (!is_valid_topic(topic)) fail(ErrorCode::protocol, "invalid topic '" + std::string(topic) + "'");
}

void check_pattern(std::string_view pattern) {
  if (!is_valid_pattern(pattern))
    fail(ErrorCode::protocol, "invalid topic pattern '" + std::string(pattern) + "'");
}

bool match(std::string_view pattern, std::string_view topic) noexcept {
  if (!is_valid_pattern(pattern) || !is_valid_topic(topic)) return false;
  const auto p = split(pattern);
  const auto t = split(topic);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == "#") return t.size() > i;
    if (i >= t.size()) return false;
    if (p[i] != "+" && p[i] != t[i]) return false;
  }
  return p.size() == t.size();
}

}  // namespace cranetwin::bus
