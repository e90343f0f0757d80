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
#include <filesystem>
#include <sstream>

#include <doctest.h>

#include "drpo/encoder.h"
#include "drpo/error.h"
#include "generators.h"
#include "oracles.h"

using drpo::Encoder;
using drpo::Matrix;

namespace {

// 0.5 * sum(z .* R) + 0.25 * sum(z.^2) for a fixed random R; upstream is R/2 + z/2.
double probe_loss(const Encoder& enc, const Matrix& X, const Matrix& R) {
  const Matrix z = enc.forward(X);
  return 0.5 * (z.array() * R.array()).sum() + 0.25 * z.squaredNorm();
}

}  // namespace

TEST_CASE("identity single layer passes positive inputs through") {
  Encoder enc({3, 3});
  enc.set_weight(0, Matrix::Identity(3, 3));
  const Matrix X = Matrix::Constant(4, 3, 0.7);
  CHECK(enc.forward(X) == X);
}

TEST_CASE("zero weights give zero output") {
  const Encoder enc({5, 4, 2});
  gen::Rng rng(51);
  CHECK(enc.forward(gen::gaussian_matrix(rng, 6, 5)).isZero(0.0));
}

TEST_CASE("forward matches a per-neuron loop oracle") {
  gen::Rng rng(52);
  for (int trial = 0; trial < 20; ++trial) {
    const int layers = gen::uniform_int(rng, 1, 4);
    std::vector<int> dims{gen::uniform_int(rng, 1, 7)};
    for (int l = 0; l < layers; ++l) dims.push_back(gen::uniform_int(rng, 1, 7));
    const auto enc = Encoder::random_init(dims, 0.1, trial);
    const Matrix X = gen::gaussian_matrix(rng, 9, dims[0]);
    const Matrix want = oracle::mlp_forward(enc.weights(), 0.1, X);
    CHECK((enc.forward(X) - want).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("forward rejects a width mismatch") {
  const Encoder enc({3, 2});
  CHECK_THROWS_AS(enc.forward(Matrix::Zero(2, 4)), drpo::DataError);
}

TEST_CASE("no biases: parameter count is the sum of weight sizes") {
  const Encoder enc({36, 32, 16, 8});
  CHECK(enc.parameter_count() == 36 * 32 + 32 * 16 + 16 * 8);
  CHECK(enc.num_layers() == 3);
  CHECK(enc.latent_dim() == 8);
  CHECK_THROWS_AS(Encoder({4}), drpo::UsageError);
  CHECK_THROWS_AS(Encoder({4, 0}), drpo::UsageError);
}

TEST_CASE("random init respects the fan-in bound and the seed") {
  const auto a = Encoder::random_init({10, 6, 3}, 0.1, 7);
  CHECK(a == Encoder::random_init({10, 6, 3}, 0.1, 7));
  CHECK_FALSE(a == Encoder::random_init({10, 6, 3}, 0.1, 8));
  CHECK(a.weights()[0].cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(10.0));
  CHECK(a.weights()[1].cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(6.0));
}

TEST_CASE("backward needs the matching cache") {
  const auto enc = Encoder::random_init({3, 2}, 0.1, 0);
  drpo::ForwardCache cache;
  CHECK_THROWS_AS(enc.backward(cache, Matrix::Zero(2, 2)), drpo::UsageError);
  enc.forward(Matrix::Ones(2, 3), cache);
  CHECK_THROWS_AS(enc.backward(cache, Matrix::Zero(5, 2)), drpo::DataError);
}

TEST_CASE("zero upstream gives zero gradients") {
  const auto enc = Encoder::random_init({4, 3, 2}, 0.1, 1);
  drpo::ForwardCache cache;
  gen::Rng rng(53);
  enc.forward(gen::gaussian_matrix(rng, 5, 4), cache);
  for (const auto& g : enc.backward(cache, Matrix::Zero(5, 2))) CHECK(g.isZero(0.0));
}

TEST_CASE("linear least squares gradient has the closed form") {
  gen::Rng rng(54);
  const int n = 13;
  const Matrix X = gen::gaussian_matrix(rng, n, 4);
  const Matrix T = gen::gaussian_matrix(rng, n, 3);
  const auto enc = Encoder::random_init({4, 3}, 0.1, 2);
  drpo::ForwardCache cache;
  const Matrix z = enc.forward(X, cache);
  const Matrix upstream = 2.0 * (z - T) / n;
  const Matrix want = 2.0 * X.transpose() * (X * enc.weights()[0] - T) / n;
  CHECK((enc.backward(cache, upstream)[0] - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gradients match central finite differences for 1 to 3 layers") {
  gen::Rng rng(55);
  for (int layers = 1; layers <= 3; ++layers) {
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<int> dims{gen::uniform_int(rng, 1, 5)};
      for (int l = 0; l < layers; ++l) dims.push_back(gen::uniform_int(rng, 1, 5));
      const auto enc = Encoder::random_init(dims, 0.1, 100 * layers + trial);
      const Matrix X = gen::gaussian_matrix(rng, 6, dims[0]);
      const Matrix R = gen::gaussian_matrix(rng, 6, dims.back());
      drpo::ForwardCache cache;
      const Matrix z = enc.forward(X, cache);
      const auto analytic = enc.backward(cache, 0.5 * R + 0.5 * z);
      const auto numeric =
          oracle::fd_gradient(enc, [&](const Encoder& e) { return probe_loss(e, X, R); });
      CHECK(oracle::relative_error(analytic, numeric) < 1e-4);
    }
  }
}

TEST_CASE("forward is bitwise deterministic") {
  const auto enc = Encoder::random_init({8, 5, 2}, 0.1, 3);
  gen::Rng rng(56);
  const Matrix X = gen::gaussian_matrix(rng, 20, 8);
  CHECK(enc.forward(X) == enc.forward(X));
}

TEST_CASE("checkpoints round trip bit-exactly") {
  const auto enc = Encoder::random_init({6, 4, 2}, 0.2, 4);
  std::stringstream ss;
  enc.write_binary(ss);
  CHECK(Encoder::read_binary(ss) == enc);
  const auto path = std::filesystem::temp_directory_path() / "drpo_encoder_rt.bin";
  enc.save(path.string());
  const auto back = Encoder::load(path.string());
  CHECK(back == enc);
  CHECK(back.leaky_slope() == 0.2);
  std::filesystem::remove(path);
  std::stringstream bad("DRPOENC1 but then nothing useful");
  CHECK_THROWS_AS(Encoder::read_binary(bad), drpo::DataError);
  CHECK_THROWS_AS(Encoder::load("/nonexistent/enc.bin"), drpo::DataError);
}

TEST_CASE("zero gradients without decay leave weights unchanged") {
  auto enc = Encoder::random_init({4, 3}, 0.1, 5);
  const auto before = enc;
  drpo::AdamConfig cfg;
  cfg.weight_decay = 0.0;
  drpo::OptimState state(enc, cfg);
  for (int s = 0; s < 5; ++s) drpo::optimizer_step(enc, {Matrix::Zero(4, 3)}, state);
  CHECK(enc == before);
  CHECK(state.step() == 5);
}

TEST_CASE("pure weight decay shrinks the weight norm every step") {
  auto enc = Encoder::random_init({5, 4, 2}, 0.1, 6);
  drpo::AdamConfig cfg;
  cfg.weight_decay = 1e-2;
  cfg.learning_rate = 1e-3;
  drpo::OptimState state(enc, cfg);
  double prev = enc.squared_weight_norm();
  for (int s = 0; s < 20; ++s) {
    drpo::optimizer_step(enc, {Matrix::Zero(5, 4), Matrix::Zero(4, 2)}, state);
    const double now = enc.squared_weight_norm();
    CHECK(now < prev);
    prev = now;
  }
}

TEST_CASE("adam decreases a convex quadratic") {
  gen::Rng rng(57);
  const Matrix X = gen::gaussian_matrix(rng, 30, 4);
  const Matrix T = gen::gaussian_matrix(rng, 30, 2);
  auto enc = Encoder::random_init({4, 2}, 0.1, 7);
  drpo::AdamConfig cfg;
  cfg.learning_rate = 1e-2;
  drpo::OptimState state(enc, cfg);
  auto loss = [&](const Encoder& e) { return (e.forward(X) - T).squaredNorm() / 30.0; };
  const double initial = loss(enc);
  double prev = initial;
  for (int s = 0; s < 20; ++s) {
    drpo::ForwardCache cache;
    const Matrix z = enc.forward(X, cache);
    drpo::optimizer_step(enc, enc.backward(cache, 2.0 * (z - T) / 30.0), state);
    const double now = loss(enc);
    CHECK(now < prev);
    prev = now;
  }
  CHECK(prev < initial);
}

TEST_CASE("optimizer rejects mismatched gradients") {
  auto enc = Encoder::random_init({4, 3}, 0.1, 8);
  drpo::OptimState state(enc);
  CHECK_THROWS_AS(drpo::optimizer_step(enc, {Matrix::Zero(3, 3)}, state), drpo::DataError);
  CHECK_THROWS_AS(drpo::optimizer_step(enc, {}, state), drpo::DataError);
}
