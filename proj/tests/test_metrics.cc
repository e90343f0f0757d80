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

#include <cmath>
#include <vector>

#include <doctest.h>

#include "drpo/error.h"
#include "drpo/metrics.h"
#include "generators.h"
#include "oracles.h"

using drpo::Label;

namespace {

std::vector<Label> to_labels(const std::vector<bool>& anomaly) {
  std::vector<Label> out;
  for (bool a : anomaly) out.push_back(a ? Label::kAnomaly : Label::kNormal);
  return out;
}

}  // namespace

TEST_CASE("perfect, inverted and constant scorers") {
  const std::vector<Label> y{Label::kNormal, Label::kNormal, Label::kAnomaly,
                             Label::kAnomaly};
  CHECK(drpo::roc_auc(std::vector<double>{0, 1, 2, 3}, y) == 1.0);
  CHECK(drpo::roc_auc(std::vector<double>{3, 2, 1, 0}, y) == 0.0);
  CHECK(drpo::roc_auc(std::vector<double>{1, 1, 1, 1}, y) == 0.5);
  CHECK(drpo::roc_auc(std::vector<double>{0, 2, 1, 3}, y) == 0.75);
}

TEST_CASE("auc needs both classes and matching lengths") {
  const std::vector<Label> normals(3, Label::kNormal);
  CHECK_THROWS_AS(drpo::roc_auc(std::vector<double>{1, 2, 3}, normals), drpo::DataError);
  const std::vector<Label> y{Label::kNormal, Label::kAnomaly};
  CHECK_THROWS_AS(drpo::roc_auc(std::vector<double>{1, 2, 3}, y), drpo::DataError);
  CHECK_THROWS_AS(drpo::roc_auc(std::vector<double>{1, std::nan("")}, y),
                  drpo::NumericError);
}

TEST_CASE("rank auc equals the pairwise definition under heavy ties") {
  gen::Rng rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = gen::uniform_int(rng, 2, 80);
    const auto s = trial % 3 == 0 ? gen::continuous_values(rng, n)
                                  : gen::tied_values(rng, n, gen::uniform_int(rng, 1, 5));
    std::vector<bool> anomaly(static_cast<std::size_t>(n));
    for (auto&& a : anomaly) a = gen::uniform(rng, 0, 1) < 0.3;
    anomaly[0] = true;
    anomaly[1] = false;
    const double got = drpo::roc_auc(s, to_labels(anomaly));
    CHECK(std::fabs(got - oracle::pairwise_auc(s, anomaly)) <= 1e-12);
  }
}

TEST_CASE("auc is invariant to strictly increasing score transforms") {
  gen::Rng rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = gen::uniform_int(rng, 2, 50);
    auto s = gen::tied_values(rng, n, 6);
    std::vector<bool> anomaly(static_cast<std::size_t>(n));
    for (auto&& a : anomaly) a = gen::uniform(rng, 0, 1) < 0.5;
    anomaly[0] = true;
    anomaly[1] = false;
    std::vector<double> t;
    for (double x : s) t.push_back(std::exp(x) * 3.0 + 1.0);
    const auto y = to_labels(anomaly);
    CHECK(drpo::roc_auc(s, y) == doctest::Approx(drpo::roc_auc(t, y)).epsilon(1e-15));
  }
}
