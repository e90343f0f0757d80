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

// Hand-rolled random instance generators for property tests.
#ifndef DRPO_TESTS_GENERATORS_H_
#define DRPO_TESTS_GENERATORS_H_

#include <cstdint>
#include <random>
#include <vector>

#include "drpo/types.h"

namespace gen {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline drpo::Matrix gaussian_matrix(Rng& rng, int rows, int cols, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  drpo::Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = nd(rng);
  return m;
}

// Values drawn from a small integer grid so that ties are frequent.
inline std::vector<double> tied_values(Rng& rng, int n, int levels) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = uniform_int(rng, 0, levels - 1) * 0.5;
  return v;
}

inline std::vector<double> continuous_values(Rng& rng, int n) {
  std::normal_distribution<double> nd(0.0, 3.0);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = nd(rng);
  return v;
}

inline std::vector<std::vector<double>> rows(const drpo::Matrix& m) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(m.rows()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out[i].push_back(m(i, j));
  return out;
}

}  // namespace gen

#endif  // DRPO_TESTS_GENERATORS_H_
