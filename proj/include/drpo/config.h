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

#ifndef DRPO_CONFIG_H_
#define DRPO_CONFIG_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "drpo/experiment.h"

namespace drpo {

/// Sectioned key/value run configuration for the bench, sweep and train
/// commands. Every key has a documented default; unknown sections or keys
/// are rejected by name.
///
///   [experiment] method (comma list for bench) seeds workers
///   [data]       source modes dim n_per_mode anomaly_n path label_column
///                normal_classes k_normal test_fraction val_fraction
///                standardize contamination sad_ratio sad_classes
///   [projections] count dim components_dropout projections_dropout
///   [model]      hidden latent_dim leaky_slope eps_floor ridge stats_mode
///   [training]   epochs batch_size learning_rate beta1 beta2 epsilon
///                weight_decay
///   [affine]     mode alpha lo hi
///   [sweep]      axis values
///   [output]     results aggregate checkpoint history
struct RunConfig {
  ExperimentSpec spec;  // spec.method is methods.front()
  // bench compares every listed method; sweep and train take exactly one.
  std::vector<Method> methods;
  std::optional<SweepAxis> sweep_axis;
  std::vector<std::string> sweep_values;
  std::string results_path = "results.csv";
  std::string aggregate_path = "aggregate.csv";
  std::string checkpoint_path;
  std::string history_path;

  /// Checks that input files exist and output directories are writable.
  void validate_paths() const;
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// "0,1,5" or ranges such as "0-19" (inclusive), or mixes of both.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace drpo

#endif  // DRPO_CONFIG_H_
