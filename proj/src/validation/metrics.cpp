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

#include "validation/metrics.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "common/error.hpp"

namespace cranetwin::validation {

namespace {

void check_pair(std::span<const double> a, std::span<const double> b) {
  require(!a.empty() && !b.empty(), ErrorCode::domain, "metric inputs must be non-empty");
  require(a.size() == b.size(), ErrorCode::domain, "metric inputs must have equal length");
}

struct Cell {
  double cost = std::numeric_limits<double>::infinity();
  std::size_t length = 0;
};

// Lexicographic order: cheaper first, then longer.
bool better(const Cell& lhs, const Cell& rhs) {
  if (lhs.cost != rhs.cost) return lhs.cost < rhs.cost;
  return lhs.length > rhs.length;
}

}  // namespace

double rmse(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(a.size()));
}

double max_dev(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

double dtw(std::span<const double> a, std::span<const double> b, std::size_t band) {
  require(!a.empty() && !b.empty(), ErrorCode::domain, "dtw inputs must be non-empty");
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const std::size_t gap = n > m ? n - m : m - n;
  require(band >= gap, ErrorCode::domain, "dtw band narrower than the length difference");

  // Two rolling rows over j in [0, m).
  std::vector<Cell> prev(m), curr(m);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i > band ? i - band : 0;
    const std::size_t hi = std::min(m - 1, i + band);
    // curr still holds row i - 2, whose band starts at i - 2 - band.
    const std::size_t stale = i > band + 2 ? i - band - 2 : 0;
    std::fill(curr.begin() + static_cast<std::ptrdiff_t>(stale),
              curr.begin() + static_cast<std::ptrdiff_t>(hi + 1), Cell{});
    for (std::size_t j = lo; j <= hi; ++j) {
      const double c = std::abs(a[i] - b[j]);
      if (i == 0 && j == 0) {
        curr[j] = {c, 1};
        continue;
      }
      Cell best;
      if (i > 0 && j > 0 && better(prev[j - 1], best)) best = prev[j - 1];
      if (i > 0 && better(prev[j], best)) best = prev[j];
      if (j > 0 && better(curr[j - 1], best)) best = curr[j - 1];
      if (best.length == 0) continue;
      curr[j] = {best.cost + c, best.length + 1};
    }
    std::swap(prev, curr);
  }
  const Cell& end = prev[m - 1];
  return end.cost / static_cast<double>(end.length);
}

}  // namespace cranetwin::validation
