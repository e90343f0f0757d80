// Copyright 2026 The DRPO Authors.
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

#include "drpo/core_stats.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "drpo/error.h"

namespace drpo {

SampleVector::SampleVector(std::vector<double> values)
    : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DataError("non-finite sample entry at index " + std::to_string(i));
    }
  }
}

double median_inplace(std::span<double> scratch) {
  const std::size_t n = scratch.size();
  if (n == 0) throw DataError("empty sample");
  const auto mid = scratch.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(scratch.begin(), mid, scratch.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  // Lower-middle is the largest element of the left partition.
  const double lower = *std::max_element(scratch.begin(), mid);
  return (lower + upper) / 2.0;
}

double mad_inplace(std::span<double> scratch, double center) {
  for (double& x : scratch) x = std::abs(x - center);
  return median_inplace(scratch);
}

double median(std::span<const double> v) {
  std::vector<double> scratch(v.begin(), v.end());
  return median_inplace(scratch);
}

double median(const SampleVector& v) { return median(v.values()); }

double mad(std::span<const double> v, double center) {
  if (!std::isfinite(center)) throw DataError("non-finite MAD center");
  std::vector<double> scratch(v.begin(), v.end());
  return mad_inplace(scratch, center);
}

double mad(const SampleVector& v, double center) { return mad(v.values(), center); }

}  // namespace drpo
