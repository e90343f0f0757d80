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

#ifndef DRPO_CORE_STATS_H_
#define DRPO_CORE_STATS_H_

#include <span>
#include <vector>

namespace drpo {

/// A finite, nonempty-on-use sample of real values. Construction rejects NaN
/// and infinite entries.
class SampleVector {
 public:
  SampleVector() = default;
  explicit SampleVector(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

 private:
  std::vector<double> values_;
};

/// Sample median. Even lengths return the average of the two central order
/// statistics. Throws DataError("empty sample") on empty input.
double median(std::span<const double> v);
double median(const SampleVector& v);

/// Raw median absolute deviation around `center`, without the Gaussian
/// consistency factor.
double mad(std::span<const double> v, double center);
double mad(const SampleVector& v, double center);

// In-place variants used on hot paths; `scratch` is reordered.
double median_inplace(std::span<double> scratch);
double mad_inplace(std::span<double> scratch, double center);

}  // namespace drpo

#endif  // DRPO_CORE_STATS_H_
