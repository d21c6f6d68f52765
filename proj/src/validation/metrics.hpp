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

#include <cstddef>
#include <span>

namespace cranetwin::validation {

// Both sequences must be non-empty and of equal length.
double rmse(std::span<const double> a, std::span<const double> b);
double max_dev(std::span<const double> a, std::span<const double> b);

// Dynamic time warping with absolute-difference cost and a Sakoe-Chiba band
// (cells with |i - j| <= band). Returns the accumulated cost of the cheapest
// monotone alignment divided by its length in cells; among equally cheap
// alignments the longest one is used, which keeps the result symmetric.
// Requires band >= |len(a) - len(b)|.
double dtw(std::span<const double> a, std::span<const double> b, std::size_t band);

}  // namespace cranetwin::validation
