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

#ifndef DRPO_EXPERIMENT_H_
#define DRPO_EXPERIMENT_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "drpo/checkpoint.h"
#include "drpo/dataset.h"
#include "drpo/encoder.h"
#include "drpo/method.h"
#include "drpo/projections.h"
#include "drpo/trainers.h"

namespace drpo {

struct DataSource {
  enum class Kind { kSynthetic, kCsv };
  Kind kind = Kind::kSynthetic;

  // Synthetic source.
  int modes = 2;
  int dim = 16;
  int n_per_mode = 500;
  int anomaly_n = 400;

  // CSV source. Normal classes are either listed, or `k_normal` of them are
  // drawn per seed.
  std::string path;
  std::string label_column = "class";
  std::vector<int> normal_classes;
  int k_normal = 0;

  double test_fraction = 0.3;
  double val_fraction = 0.1;
  bool standardize = true;

  std::string name() const;
};

/// Declarative description of one benchmark run.
struct ExperimentSpec {
  Method method = Method::kDeepRpoMean;
  DataSource data;

  int n_projections = 0;  // 0 picks the default for the method
  int rp_dim = 1;
  double components_dropout = 0.0;
  double projections_dropout = 0.0;

  std::vector<int> hidden = {32, 16};
  int latent_dim = 8;
  double leaky_slope = 0.1;
  double eps_floor = kDefaultEpsFloor;
  double ridge = kDefaultRidge;
  StatsMode stats_mode = StatsMode::kBatch;

  int epochs = 50;
  int batch_size = 128;
  AdamConfig adam;

  double sad_ratio = 0.0;
  int sad_classes = 2;
  double contamination = 0.0;

  AffineSpec affine;  // seed is replaced by a per-run sub-seed

  std::vector<std::uint64_t> seeds = {0};
  int workers = 1;

  /// 1000 projections for shallow scoring and latent spaces wider than 8,
  /// 500 for low-dimensional latent spaces.
  int effective_projections() const;
  void validate() const;
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<int> normal_classes;
  int best_epoch = -1;  // -1 for shallow methods
  double val_auc = 0.0;
  double test_auc = 0.0;
  double wall_time = 0.0;  // seconds
  std::vector<EpochRecord> history;
};

struct Aggregate {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  std::size_t n = 0;
};

Aggregate aggregate(std::span<const double> values);
Aggregate aggregate_test_auc(std::span<const SeedResult> results);

struct ExperimentResult {
  std::vector<SeedResult> seeds;
  Aggregate test_auc;
};

struct PreparedData {
  Dataset data;
  std::vector<int> normal_classes;
  std::optional<Standardizer> standardizer;
};

/// Loads (CSV) or generates (synthetic) the dataset without seed-dependent
/// steps. CSV files are read once and shared across seeds.
Dataset load_source(const DataSource& source);

/// Applies the per-seed protocol to `raw`: class pick, test holdout,
/// validation split, contamination, SAD labels, standardization, affine
/// perturbation. `raw` may be empty for synthetic sources.
PreparedData prepare_dataset(const ExperimentSpec& spec, std::uint64_t seed,
                             const Dataset* raw = nullptr);

struct SeedRun {
  SeedResult result;
  ModelCheckpoint checkpoint;
};

/// Fits or trains the method on one seed and reports validation and test AUC.
SeedRun run_seed(const ExperimentSpec& spec, std::uint64_t seed,
                 const Dataset* raw = nullptr);

using ProgressFn = std::function<void(const SeedResult&)>;

/// Runs every seed (up to `spec.workers` in parallel) and aggregates. The
/// first failing seed aborts the run with its id attached.
ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const ProgressFn& progress = {});

enum class SweepAxis { kNProjections, kRpDim, kDropout, kAlpha, kSadRatio };

SweepAxis parse_sweep_axis(std::string_view name);
std::string_view to_string(SweepAxis axis);

/// Copy of `base` with one axis value applied. Dropout values are "none",
/// "c:<rate>" (components) or "p:<rate>" (projections).
ExperimentSpec apply_axis(const ExperimentSpec& base, SweepAxis axis,
                          std::string_view value);

struct SweepRow {
  std::string axis_value;
  ExperimentResult result;
  std::optional<Aggregate> auc_gap;  // alpha axis: per-seed gap vs alpha = 1
};

struct SweepTable {
  SweepAxis axis = SweepAxis::kNProjections;
  Method method = Method::kDeepRpoMean;
  std::vector<SweepRow> rows;
};

SweepTable sweep(const ExperimentSpec& base, SweepAxis axis,
                 const std::vector<std::string>& values,
                 const ProgressFn& progress = {});

/// Truncation (not rounding) toward zero to `decimals` places.
double truncate_decimals(double value, int decimals);

// CSV emitters. AUCs are written at full precision.
void write_results_header(std::ostream& out, bool with_axis);
void write_results_rows(std::ostream& out, const ExperimentSpec& spec,
                        const ExperimentResult& result,
                        std::optional<std::string_view> axis_value = std::nullopt);
void write_aggregate_header(std::ostream& out, bool with_gap);
void write_aggregate_row(std::ostream& out, Method method, std::string_view axis_value,
                         const Aggregate& agg,
                         const std::optional<Aggregate>& gap = std::nullopt);
void write_sweep_csv(std::ostream& results, std::ostream& aggregates,
                     const ExperimentSpec& base, const SweepTable& table);

}  // namespace drpo

#endif  // DRPO_EXPERIMENT_H_
