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

#include "drpo/encoder.h"

#include <cmath>
#include <fstream>

#include "drpo/binary_io.h"
#include "drpo/error.h"
#include "drpo/random.h"

namespace drpo {
namespace {

constexpr std::string_view kMagic = "DRPOENC1";
constexpr std::uint32_t kFormatVersion = 1;

}  // namespace

Encoder::Encoder(std::vector<int> layer_dims, double leaky_slope)
    : layer_dims_(std::move(layer_dims)), leaky_slope_(leaky_slope) {
  if (layer_dims_.size() < 2) throw UsageError("encoder needs at least one layer");
  for (int dim : layer_dims_) {
    if (dim < 1) throw UsageError("encoder layer widths must be positive");
  }
  if (!std::isfinite(leaky_slope_) || leaky_slope_ < 0.0) {
    throw UsageError("leaky slope must be finite and nonnegative");
  }
  for (std::size_t l = 0; l + 1 < layer_dims_.size(); ++l) {
    weights_.push_back(Matrix::Zero(layer_dims_[l], layer_dims_[l + 1]));
  }
}

Encoder Encoder::random_init(std::vector<int> layer_dims, double leaky_slope,
                             std::uint64_t seed) {
  Encoder enc(std::move(layer_dims), leaky_slope);
  Rng rng(seed);
  for (Matrix& w : enc.weights_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(w.rows()));
    std::uniform_real_distribution<double> uniform(-bound, bound);
    for (Eigen::Index c = 0; c < w.cols(); ++c)
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = uniform(rng);
  }
  return enc;
}

void Encoder::set_weight(int l, Matrix w) {
  if (l < 0 || l >= num_layers()) throw UsageError("layer index out of range");
  const Matrix& cur = weights_[static_cast<std::size_t>(l)];
  if (w.rows() != cur.rows() || w.cols() != cur.cols()) {
    throw DataError("weight shape mismatch for layer " + std::to_string(l));
  }
  if (!w.allFinite()) throw NumericError("non-finite weight");
  weights_[static_cast<std::size_t>(l)] = std::move(w);
}

std::size_t Encoder::parameter_count() const {
  std::size_t total = 0;
  for (const Matrix& w : weights_) total += static_cast<std::size_t>(w.size());
  return total;
}

double Encoder::squared_weight_norm() const {
  double total = 0.0;
  for (const Matrix& w : weights_) total += w.squaredNorm();
  return total;
}

Matrix Encoder::forward(const Matrix& X) const {
  ForwardCache scratch;
  return forward(X, scratch);
}

Matrix Encoder::forward(const Matrix& X, ForwardCache& cache) const {
  if (X.cols() != input_dim()) {
    throw DataError("encoder expects " + std::to_string(input_dim()) +
                    " input columns, got " + std::to_string(X.cols()));
  }
  cache.clear();
  Matrix h = X;
  const int L = num_layers();
  for (int l = 0; l < L; ++l) {
    Matrix a = h * weights_[static_cast<std::size_t>(l)];
    cache.layer_inputs.push_back(std::move(h));
    if (l + 1 == L) return a;
    h = a.array().max(0.0) + leaky_slope_ * a.array().min(0.0);
    cache.pre_activations.push_back(std::move(a));
  }
  return h;  // unreachable: L >= 1
}

Gradients Encoder::backward(const ForwardCache& cache, const Matrix& upstream) const {
  const int L = num_layers();
  if (!cache.valid() || static_cast<int>(cache.layer_inputs.size()) != L ||
      static_cast<int>(cache.pre_activations.size()) != L - 1) {
    throw UsageError("backward called without a matching forward cache");
  }
  const Eigen::Index n = cache.layer_inputs.front().rows();
  if (upstream.rows() != n || upstream.cols() != latent_dim()) {
    throw DataError("upstream gradient shape does not match the cached batch");
  }
  Gradients grads(static_cast<std::size_t>(L));
  Matrix g = upstream;
  for (int l = L - 1; l >= 0; --l) {
    const auto ul = static_cast<std::size_t>(l);
    grads[ul] = cache.layer_inputs[ul].transpose() * g;
    if (l == 0) break;
    g = g * weights_[ul].transpose();
    const Matrix& a = cache.pre_activations[ul - 1];
    g = (a.array() > 0.0).select(g, leaky_slope_ * g);
  }
  return grads;
}

bool operator==(const Encoder& a, const Encoder& b) {
  if (a.layer_dims_ != b.layer_dims_ || a.leaky_slope_ != b.leaky_slope_) return false;
  for (std::size_t l = 0; l < a.weights_.size(); ++l) {
    if (a.weights_[l] != b.weights_[l]) return false;
  }
  return true;
}

void Encoder::write_binary(std::ostream& out) const {
  binio::write_magic(out, kMagic);
  binio::write_pod<std::uint32_t>(out, kFormatVersion);
  binio::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(layer_dims_.size()));
  for (int dim : layer_dims_) binio::write_pod<std::int32_t>(out, dim);
  binio::write_pod<double>(out, leaky_slope_);
  for (const Matrix& w : weights_) binio::write_matrix(out, w);
}

Encoder Encoder::read_binary(std::istream& in) {
  binio::expect_magic(in, kMagic);
  const auto version = binio::read_pod<std::uint32_t>(in);
  if (version != kFormatVersion) {
    throw DataError("unsupported encoder checkpoint version " + std::to_string(version));
  }
  const auto n_dims = binio::read_pod<std::uint32_t>(in);
  if (n_dims < 2 || n_dims > 1024) throw DataError("corrupt encoder checkpoint");
  std::vector<int> dims(n_dims);
  for (int& dim : dims) dim = binio::read_pod<std::int32_t>(in);
  const double slope = binio::read_pod<double>(in);
  Encoder enc(std::move(dims), slope);
  for (int l = 0; l < enc.num_layers(); ++l) enc.set_weight(l, binio::read_matrix(in));
  return enc;
}

void Encoder::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  write_binary(out);
  if (!out) throw DataError("write failed: " + path);
}

Encoder Encoder::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path);
  return read_binary(in);
}

OptimState::OptimState(const Encoder& encoder, AdamConfig config)
    : config_(config) {
  if (!(config_.learning_rate > 0.0) || config_.weight_decay < 0.0 ||
      !(config_.beta1 >= 0.0 && config_.beta1 < 1.0) ||
      !(config_.beta2 >= 0.0 && config_.beta2 < 1.0) || !(config_.epsilon > 0.0)) {
    throw UsageError("invalid optimizer hyperparameters");
  }
  for (const Matrix& w : encoder.weights()) {
    first_.push_back(Matrix::Zero(w.rows(), w.cols()));
    second_.push_back(Matrix::Zero(w.rows(), w.cols()));
  }
}

void OptimState::apply(Encoder& encoder, const Gradients& grads) {
  auto& weights = encoder.mutable_weights();
  if (grads.size() != weights.size() || first_.size() != weights.size()) {
    throw DataError("gradient count does not match the encoder");
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (grads[l].rows() != weights[l].rows() || grads[l].cols() != weights[l].cols() ||
        first_[l].rows() != weights[l].rows() || first_[l].cols() != weights[l].cols()) {
      throw DataError("gradient shape mismatch for layer " + std::to_string(l));
    }
  }
  ++step_;
  const double t = static_cast<double>(step_);
  const double bias1 = 1.0 - std::pow(config_.beta1, t);
  const double bias2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const Matrix g = grads[l] + config_.weight_decay * weights[l];
    first_[l] = config_.beta1 * first_[l] + (1.0 - config_.beta1) * g;
    second_[l] =
        config_.beta2 * second_[l] + (1.0 - config_.beta2) * g.cwiseProduct(g);
    const auto m_hat = first_[l].array() / bias1;
    const auto v_hat = second_[l].array() / bias2;
    weights[l].array() -=
        config_.learning_rate * m_hat / (v_hat.sqrt() + config_.epsilon);
  }
  for (const Matrix& w : weights) {
    if (!w.allFinite()) throw NumericError("optimizer produced non-finite weights");
  }
}

}  // namespace drpo
