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

#ifndef DRPO_RANDOM_H_
#define DRPO_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace drpo {

using Rng = std::mt19937_64;

/// Derives an independent sub-seed for a named stochastic component of a run
/// (class pick, splits, projections, weight init, shuffling, ...).
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag);

/// `k` distinct indices drawn uniformly from [0, n), returned in draw order.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    Rng& rng);

}  // namespace drpo

#endif  // DRPO_RANDOM_H_
