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

#ifndef DRPO_ENCODER_H_
#define DRPO_ENCODER_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "drpo/types.h"

namespace drpo {

/// One gradient matrix per weight matrix, same shapes.
using Gradients = std::vector<Matrix>;

/// Intermediates recorded by Encoder::forward for the matching backward pass.
struct ForwardCache {
  std::vector<Matrix> layer_inputs;     // input fed to each layer
  std::vector<Matrix> pre_activations;  // hidden layers only
  bool valid() const { return !layer_inputs.empty(); }
  void clear() {
    layer_inputs.clear();
    pre_activations.clear();
  }
};

/// Bias-free multilayer perceptron with leaky-rectifier hidden activations
/// and a linear output layer: z = act(...act(X W1)...) W_L.
class Encoder {
 public:
  /// Zero weights. `layer_dims` lists d0 -> ... -> d_L and needs >= 2 entries.
  explicit Encoder(std::vector<int> layer_dims, double leaky_slope = 0.1);

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization.
  static Encoder random_init(std::vector<int> layer_dims, double leaky_slope,
                             std::uint64_t seed);

  const std::vector<int>& layer_dims() const { return layer_dims_; }
  int input_dim() const { return layer_dims_.front(); }
  int latent_dim() const { return layer_dims_.back(); }
  int num_layers() const { return static_cast<int>(weights_.size()); }
  double leaky_slope() const { return leaky_slope_; }

  const std::vector<Matrix>& weights() const { return weights_; }
  /// Replaces weight l; the shape must match.
  void set_weight(int l, Matrix w);
  std::vector<Matrix>& mutable_weights() { return weights_; }

  std::size_t parameter_count() const;
  /// Sum over layers of the squared Frobenius norm.
  double squared_weight_norm() const;

  Matrix forward(const Matrix& X) const;
  Matrix forward(const Matrix& X, ForwardCache& cache) const;

  /// Gradients of a scalar loss whose derivative w.r.t. the output is
  /// `upstream` (n x d_L), for the batch recorded in `cache`.
  Gradients backward(const ForwardCache& cache, const Matrix& upstream) const;

  void write_binary(std::ostream& out) const;
  static Encoder read_binary(std::istream& in);
  void save(const std::string& path) const;
  static Encoder load(const std::string& path);

  friend bool operator==(const Encoder& a, const Encoder& b);

 private:
  std::vector<int> layer_dims_;
  double leaky_slope_;
  std::vector<Matrix> weights_;  // weights_[l] is d_l x d_{l+1}
};

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 1e-6;
};

/// Adaptive-moment optimizer state for one encoder. Weight decay enters as
/// the gradient weight_decay * W of (weight_decay / 2) * sum ||W_l||_F^2.
class OptimState {
 public:
  explicit OptimState(const Encoder& encoder, AdamConfig config = {});

  const AdamConfig& config() const { return config_; }
  std::int64_t step() const { return step_; }
  const std::vector<Matrix>& first_moment() const { return first_; }
  const std::vector<Matrix>& second_moment() const { return second_; }

  void apply(Encoder& encoder, const Gradients& grads);

 private:
  AdamConfig config_;
  std::vector<Matrix> first_;
  std::vector<Matrix> second_;
  std::int64_t step_ = 0;
};

inline void optimizer_step(Encoder& encoder, const Gradients& grads,
                           OptimState& state) {
  state.apply(encoder, grads);
}

}  // namespace drpo

#endif  // DRPO_ENCODER_H_
