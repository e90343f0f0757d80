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

#include "drpo/trainers.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <cstdio>
#include <ostream>

#include "drpo/error.h"
#include "drpo/metrics.h"
#include "drpo/random.h"

namespace drpo {
namespace {

struct TrainingRows {
  std::vector<std::size_t> rows;         // training split, data order
  std::vector<std::size_t> normal_rows;  // without labeled anomalies
  std::vector<std::size_t> val_rows;
  std::vector<Label> val_labels;
};

TrainingRows gather_rows(const Dataset& data) {
  data.validate();
  TrainingRows t;
  t.rows = data.rows_in(Split::kTrain);
  for (std::size_t i : t.rows) {
    if (!data.sad_flag[i]) t.normal_rows.push_back(i);
  }
  if (t.normal_rows.empty()) throw DataError("training split is empty");
  t.val_rows = data.rows_in(Split::kVal);
  t.val_labels = data.labels(t.val_rows);
  const bool has_normal =
      std::count(t.val_labels.begin(), t.val_labels.end(), Label::kNormal) > 0;
  const bool has_anomaly =
      std::count(t.val_labels.begin(), t.val_labels.end(), Label::kAnomaly) > 0;
  if (!has_normal || !has_anomaly) throw DataError("validation AUC undefined");
  return t;
}

// Shuffled mini-batches; a trailing batch shorter than 2 rows is dropped.
std::vector<std::vector<std::size_t>> make_batches(std::vector<std::size_t> order,
                                                   int batch_size, Rng& rng) {
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> batches;
  const auto bs = static_cast<std::size_t>(batch_size);
  for (std::size_t start = 0; start < order.size(); start += bs) {
    const std::size_t end = std::min(order.size(), start + bs);
    if (end - start < 2) break;
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

SadConfig batch_sad(const Dataset& data, const std::vector<std::size_t>& batch) {
  SadConfig sad;
  for (std::size_t i : batch) {
    if (data.sad_flag[i]) sad.enabled = true;
    sad.labeled_anomaly.push_back(data.sad_flag[i]);
  }
  if (!sad.enabled) sad.labeled_anomaly.clear();
  return sad;
}

void check_train_config(const TrainConfig& config) {
  if (config.epochs < 0) throw UsageError("epochs must be nonnegative");
  if (config.batch_size < 2) throw UsageError("batch size must be at least 2");
}

// Shared epoch loop. `step` performs one optimizer update on a batch and
// returns its objective value; `validate` scores the current model.
template <typename Model, typename EpochStart, typename Step, typename Validate>
TrainResult<Model> run_epochs(const Model& init, const TrainingRows& rows,
                              const TrainConfig& config, EpochStart&& epoch_start,
                              Step&& step, Validate&& validate) {
  TrainResult<Model> result{init, 0, 0.0, {}};
  Model model = init;
  OptimState optim(model.encoder, config.adam);
  Rng rng(config.seed);

  result.best_val_auc = validate(model);
  result.history.push_back({0, std::numeric_limits<double>::quiet_NaN(),
                            result.best_val_auc});
  double best = -1.0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    epoch_start(model);
    double loss_sum = 0.0;
    std::size_t n_batches = 0;
    for (const auto& batch : make_batches(rows.rows, config.batch_size, rng)) {
      const std::optional<double> loss = step(model, optim, batch);
      if (!loss) continue;
      loss_sum += *loss;
      ++n_batches;
    }
    const double val_auc = validate(model);
    const double train_loss = n_batches ? loss_sum / static_cast<double>(n_batches)
                                        : std::numeric_limits<double>::quiet_NaN();
    result.history.push_back({epoch, train_loss, val_auc});
    if (val_auc > best) {
      best = val_auc;
      result.best_epoch = epoch;
      result.best_val_auc = val_auc;
      result.model = model;
    }
  }
  return result;
}

}  // namespace

StatsMode parse_stats_mode(std::string_view name) {
  if (name == "batch") return StatsMode::kBatch;
  if (name == "full-set" || name == "full_set") return StatsMode::kFullSet;
  throw UsageError("unknown stats mode '" + std::string(name) + "'");
}

std::string_view to_string(StatsMode mode) {
  return mode == StatsMode::kBatch ? "batch" : "full-set";
}

void DeepRpoModel::validate() const {
  if (projections.input_dim() != encoder.latent_dim()) {
    throw DataError("projection input dimension " +
                    std::to_string(projections.input_dim()) +
                    " does not match the encoder latent dimension " +
                    std::to_string(encoder.latent_dim()));
  }
  if (!(eps_floor > 0.0)) throw UsageError("eps_floor must be positive");
}

Gradients LossEval::objective_grads(const Encoder& encoder, double weight_decay) const {
  Gradients g = data_grads;
  for (std::size_t l = 0; l < g.size(); ++l) {
    g[l] += weight_decay * encoder.weights()[l];
  }
  return g;
}

Vector init_center(const Encoder& encoder, const Matrix& x_train) {
  if (x_train.rows() == 0) throw DataError("empty training set");
  return encoder.forward(x_train).colwise().mean().transpose();
}

LossEval svdd_loss(const SvddModel& model, const Matrix& batch) {
  if (batch.rows() == 0) throw DataError("empty batch");
  if (model.center.size() != model.encoder.latent_dim()) {
    throw DataError("center dimension does not match the encoder");
  }
  ForwardCache cache;
  const Matrix z = model.encoder.forward(batch, cache);
  const Matrix diff = z.rowwise() - model.center.transpose();
  const double n = static_cast<double>(batch.rows());
  LossEval eval;
  eval.data_loss = diff.squaredNorm() / n;
  eval.reg_loss = 0.5 * model.weight_decay * model.encoder.squared_weight_norm();
  eval.data_grads = model.encoder.backward(cache, (2.0 / n) * diff);
  return eval;
}

LossEval deep_rpo_loss(const DeepRpoModel& model, const Matrix& batch,
                       const SadConfig& sad, const RpoStats* frozen_stats) {
  model.validate();
  const Eigen::Index n = batch.rows();
  if (n == 0) throw DataError("empty batch");
  if (sad.enabled && sad.labeled_anomaly.size() != static_cast<std::size_t>(n)) {
    throw DataError("SAD flags do not match the batch size");
  }
  ForwardCache cache;
  const Matrix z = model.encoder.forward(batch, cache);
  const ProjectionSet& u = model.projections;
  const Matrix projected = u.project(z);
  const int m = u.output_dim();
  const int p = u.count();

  RpoStats stats;
  if (frozen_stats != nullptr) {
    stats = *frozen_stats;
  } else {
    std::vector<Eigen::Index> ref;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!sad.flagged(static_cast<std::size_t>(i))) ref.push_back(i);
    }
    if (ref.size() < 2) throw DataError("insufficient batch for robust stats");
    Matrix ref_proj(static_cast<Eigen::Index>(ref.size()), projected.cols());
    for (std::size_t r = 0; r < ref.size(); ++r) {
      ref_proj.row(static_cast<Eigen::Index>(r)) = projected.row(ref[r]);
    }
    stats = fit_rpo_projected(ref_proj, m, model.eps_floor, model.ridge);
  }

  const Matrix dist = normalized_distances(projected, stats);
  const Vector s = integrate(dist, model.estimator);

  // dL/d dist(i, j)
  Matrix weight(n, p);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double ds = 1.0 / static_cast<double>(n);
    if (sad.flagged(static_cast<std::size_t>(i))) {
      const double clamped = std::max(s(i), model.eps_floor);
      total += 1.0 / clamped;
      ds *= s(i) > model.eps_floor ? -1.0 / (s(i) * s(i)) : 0.0;
    } else {
      total += s(i);
    }
    if (model.estimator == Estimator::kMean) {
      weight.row(i).setConstant(ds / static_cast<double>(p));
    } else {
      weight.row(i).setZero();
      Eigen::Index arg = 0;
      dist.row(i).maxCoeff(&arg);
      weight(i, arg) = ds;
    }
  }

  // dL/d projected
  Matrix grad_proj(n, projected.cols());
  if (m == 1) {
    for (int j = 0; j < p; ++j) {
      const auto r = projected.col(j).array() - stats.location(j, 0);
      grad_proj.col(j) = weight.col(j).array() * r.sign() / stats.spread(j);
    }
  } else {
    for (int j = 0; j < p; ++j) {
      const Matrix diff = projected.middleCols(j * m, m).rowwise() - stats.location.row(j);
      const Matrix a_diff = diff * stats.inv_cov[static_cast<std::size_t>(j)];
      for (Eigen::Index i = 0; i < n; ++i) {
        const double dij = dist(i, j);
        if (dij > 0.0) {
          grad_proj.block(i, j * m, 1, m) = (weight(i, j) / dij) * a_diff.row(i);
        } else {
          grad_proj.block(i, j * m, 1, m).setZero();
        }
      }
    }
  }
  const Matrix upstream = grad_proj * u.entries().transpose();

  LossEval eval;
  eval.data_loss = total / static_cast<double>(n);
  eval.reg_loss = 0.5 * model.weight_decay * model.encoder.squared_weight_norm();
  eval.data_grads = model.encoder.backward(cache, upstream);
  eval.stats = std::move(stats);
  return eval;
}

RpoStats fit_latent_stats(const DeepRpoModel& model, const Matrix& x_ref) {
  model.validate();
  if (x_ref.rows() == 0) throw DataError("empty training set");
  return fit_rpo_projected(model.projections.project(model.encoder.forward(x_ref)),
                           model.projections.output_dim(), model.eps_floor,
                           model.ridge);
}

Vector svdd_scores(const SvddModel& model, const Matrix& X) {
  if (X.rows() == 0) return Vector(0);
  const Matrix z = model.encoder.forward(X);
  return (z.rowwise() - model.center.transpose()).rowwise().squaredNorm();
}

Vector deep_rpo_scores(const DeepRpoModel& model, const RpoStats& stats,
                       const Matrix& X) {
  if (X.rows() == 0) return Vector(0);
  return score_batch(model.encoder.forward(X), model.projections, stats,
                     model.estimator);
}

TrainResult<SvddModel> train(const SvddModel& init, const Dataset& data,
                             const TrainConfig& config) {
  check_train_config(config);
  const TrainingRows rows = gather_rows(data);
  for (std::size_t i : rows.rows) {
    if (data.sad_flag[i]) {
      throw UsageError("labeled anomalies are not supported by the SVDD objective");
    }
  }
  const Matrix x_val = data.features(rows.val_rows);
  auto validate = [&](const SvddModel& model) {
    const Vector scores = svdd_scores(model, x_val);
    return roc_auc({scores.data(), static_cast<std::size_t>(scores.size())},
                   rows.val_labels);
  };
  auto step = [&](SvddModel& model, OptimState& optim,
                  const std::vector<std::size_t>& batch) -> std::optional<double> {
    const LossEval eval = svdd_loss(model, data.features(batch));
    optim.apply(model.encoder, eval.data_grads);
    return eval.total();
  };
  return run_epochs(init, rows, config, [](SvddModel&) {}, step, validate);
}

TrainResult<DeepRpoModel> train(const DeepRpoModel& init, const Dataset& data,
                                const TrainConfig& config) {
  check_train_config(config);
  init.validate();
  const TrainingRows rows = gather_rows(data);
  const Matrix x_ref = data.features(rows.normal_rows);
  const Matrix x_val = data.features(rows.val_rows);
  std::optional<RpoStats> epoch_stats;

  auto validate = [&](const DeepRpoModel& model) {
    const Vector scores = deep_rpo_scores(model, fit_latent_stats(model, x_ref), x_val);
    return roc_auc({scores.data(), static_cast<std::size_t>(scores.size())},
                   rows.val_labels);
  };
  auto epoch_start = [&](const DeepRpoModel& model) {
    if (model.stats_mode == StatsMode::kFullSet) {
      epoch_stats = fit_latent_stats(model, x_ref);
    }
  };
  auto step = [&](DeepRpoModel& model, OptimState& optim,
                  const std::vector<std::size_t>& batch) -> std::optional<double> {
    const SadConfig sad = batch_sad(data, batch);
    if (model.stats_mode == StatsMode::kBatch) {
      const auto unflagged = std::count_if(
          batch.begin(), batch.end(), [&](std::size_t i) { return !data.sad_flag[i]; });
      if (unflagged < 2) return std::nullopt;
    }
    const RpoStats* frozen = epoch_stats ? &*epoch_stats : nullptr;
    const LossEval eval = deep_rpo_loss(model, data.features(batch), sad, frozen);
    optim.apply(model.encoder, eval.data_grads);
    return eval.total();
  };
  return run_epochs(init, rows, config, epoch_start, step, validate);
}

void write_history_csv(std::ostream& out, std::span<const EpochRecord> history) {
  out << "epoch,train_loss,val_auc\n";
  char buf[96];
  for (const EpochRecord& r : history) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", r.epoch, r.train_loss, r.val_auc);
    out << buf;
  }
}

}  // namespace drpo
