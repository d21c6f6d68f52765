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

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "model/crane_model.hpp"

namespace cranetwin::io {

// Header of every exported trace file.
inline constexpr const char* kCsvHeader = "t,x,v,l,l_dot,theta,theta_dot,wind,magnet_on";

// Round-trip exact (17 significant digits); magnet_on as 0/1.
void write_csv(std::ostream& out, const std::vector<model::CraneState>& samples);
void write_csv(const std::filesystem::path& path, const std::vector<model::CraneState>& samples);

// Throws Error(domain) on a malformed file, Error(not_found) when missing.
std::vector<model::CraneState> read_csv(const std::filesystem::path& path);

}  // namespace cranetwin::io
