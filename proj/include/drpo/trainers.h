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

#ifndef DRPO_TRAINERS_H_
#define DRPO_TRAINERS_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "drpo/dataset.h"
#include "drpo/encoder.h"
#include "drpo/projections.h"
#include "drpo/rpo.h"
#include "drpo/types.h"

namespace drpo {

/// Where the robust statistics of the deep RPO loss come from during
/// training: the current mini-batch, or all training latents refreshed once
/// per epoch.
enum class StatsMode { kBatch, kFullSet };

StatsMode parse_stats_mode(std::string_view name);
std::string_view to_string(StatsMode mode);

/// Encoder contracting normal latents towards a fixed center.
struct SvddModel {
  Encoder encoder;
  Vector center;  // frozen after init_center
  double weight_decay = 1e-6;
};

/// Encoder followed by frozen random projections of its latent space.
struct DeepRpoModel {
  Encoder encoder;
  ProjectionSet projections;  // input_dim == encoder.latent_dim()
  Estimator estimator = Estimator::kMean;
  double weight_decay = 1e-6;
  StatsMode stats_mode = StatsMode::kBatch;
  double eps_floor = kDefaultEpsFloor;
  double ridge = kDefaultRidge;

  void validate() const;
};

/// Per-sample flags marking labeled anomalies whose distance is inverted.
/// An empty flag list means every sample is unlabeled.
struct SadConfig {
  bool enabled = false;
  std::vector<unsigned char> labeled_anomaly;

  static SadConfig disabled() { return {}; }
  bool flagged(std::size_t i) const {
    return enabled && i < labeled_anomaly.size() && labeled_anomaly[i] != 0;
  }
};

/// Value of a training objective and the gradient of its data term. The
/// regularizer gradient weight_decay * W is added by the optimizer.
struct LossEval {
  double data_loss = 0.0;
  double reg_loss = 0.0;
  Gradients data_grads;
  std::optional<RpoStats> stats;  // statistics used, for the deep RPO loss

  double total() const { return data_loss + reg_loss; }
  /// Full objective gradient, data term plus weight_decay * W.
  Gradients objective_grads(const Encoder& encoder, double weight_decay) const;
};

/// Mean latent coordinates of one forward pass over `x_train`.
Vector init_center(const Encoder& encoder, const Matrix& x_train);

/// (1/n) sum ||phi(x_i) - c||^2 + (lambda/2) sum ||W_l||_F^2.
LossEval svdd_loss(const SvddModel& model, const Matrix& batch);

/// (1/n) sum_i s_i + (lambda/2) sum ||W_l||_F^2, where s_i integrates the
/// per-projection normalized distances of phi(x_i), and labeled anomalies
/// contribute 1 / max(s_i, eps_floor) instead.
///
/// MED/MAD (or the projected covariance when m > 1) are treated as
/// constants. They are taken from `frozen_stats` when given, otherwise fitted
/// on the unflagged rows of the batch, which then need at least two rows.
LossEval deep_rpo_loss(const DeepRpoModel& model, const Matrix& batch,
                       const SadConfig& sad,
                       const RpoStats* frozen_stats = nullptr);

/// Latent-space statistics of the deep RPO model fitted on `x_ref`.
RpoStats fit_latent_stats(const DeepRpoModel& model, const Matrix& x_ref);

/// Squared distance to the center in latent space.
Vector svdd_scores(const SvddModel& model, const Matrix& X);
/// Latent-space outlyingness.
Vector deep_rpo_scores(const DeepRpoModel& model, const RpoStats& stats,
                       const Matrix& X);

struct TrainConfig {
  int epochs = 50;
  int batch_size = 128;
  std::uint64_t seed = 0;  // mini-batch shuffling
  AdamConfig adam;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_auc = 0.0;
};

/// Epoch 0 is the untrained model. When epochs > 0 the selected epoch is the
/// earliest trained epoch with the highest validation AUC.
template <typename Model>
struct TrainResult {
  Model model;  // checkpoint of the selected epoch
  int best_epoch = 0;
  double best_val_auc = 0.0;
  std::vector<EpochRecord> history;
};

TrainResult<SvddModel> train(const SvddModel& init, const Dataset& data,
                             const TrainConfig& config);
TrainResult<DeepRpoModel> train(const DeepRpoModel& init, const Dataset& data,
                                const TrainConfig& config);

void write_history_csv(std::ostream& out, std::span<const EpochRecord> history);

}  // namespace drpo

#endif  // DRPO_TRAINERS_H_
