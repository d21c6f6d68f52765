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
#include "io/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "common/error.hpp"

namespace cranetwin::io {

namespace {

void put(std::string& line, double value) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", value);
  line.append(buf, static_cast<std::size_t>(n));
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<model::CraneState>& samples) {
  out << kCsvHeader << '\n';
  std::string line;
  for (const auto& s : samples) {
    line.clear();
    for (double v : {s.t, s.x, s.v, s.l, s.l_dot, s.theta, s.theta_dot, s.wind}) {
      put(line, v);
      line += ',';
    }
    line += s.magnet_on ? '1' : '0';
    out << line << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const std::vector<model::CraneState>& samples) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::storage, "cannot write " + path.string());
  write_csv(out, samples);
  if (!out) fail(ErrorCode::storage, "cannot write " + path.string());
}

std::vector<model::CraneState> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::not_found, "cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    fail(ErrorCode::domain, path.string() + ": unexpected header");
  std::vector<model::CraneState> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    double v[9];
    std::size_t field = 0;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      if (field >= 9) fail(ErrorCode::domain, path.string() + ": too many fields on row " + std::to_string(row));
      try {
        std::size_t used = 0;
        v[field] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        fail(ErrorCode::domain, path.string() + ": bad number on row " + std::to_string(row));
      }
      ++field;
    }
    if (field != 9) fail(ErrorCode::domain, path.string() + ": expected 9 fields on row " + std::to_string(row));
    model::CraneState s;
    s.t = v[0], s.x = v[1], s.v = v[2], s.l = v[3], s.l_dot = v[4];
    s.theta = v[5], s.theta_dot = v[6], s.wind = v[7], s.magnet_on = v[8] != 0.0;
    out.push_back(s);
  }
  return out;
}

}  // namespace cranetwin::io
