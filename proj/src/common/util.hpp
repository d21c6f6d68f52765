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

#include <string>
#include <string_view>

namespace cranetwin {

// Unique, sortable identifier: <prefix>-<yyyymmddThhmmss>-<counter>-<random>.
std::string make_id(std::string_view prefix);

// Wall-clock UTC timestamp with millisecond precision, ISO 8601.
std::string utc_now_iso();

// UTC calendar date, yyyy-mm-dd.
std::string utc_today();

// Microseconds since the Unix epoch.
long long unix_micros();

}  // namespace cranetwin
