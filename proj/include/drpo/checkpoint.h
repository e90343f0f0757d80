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

#ifndef DRPO_CHECKPOINT_H_
#define DRPO_CHECKPOINT_H_

#include <iosfwd>
#include <optional>
#include <string>

#include "drpo/dataset.h"
#include "drpo/encoder.h"
#include "drpo/method.h"
#include "drpo/projections.h"
#include "drpo/rpo.h"
#include "drpo/types.h"

namespace drpo {

/// Everything needed to score raw feature rows with a fitted model: the input
/// standardizer, the encoder (deep methods), the projections and fitted
/// statistics (RPO methods) or the center (SVDD).
struct ModelCheckpoint {
  Method method = Method::kRpoMax;
  std::optional<Standardizer> standardizer;
  std::optional<Encoder> encoder;
  std::optional<ProjectionSet> projections;
  std::optional<RpoStats> stats;
  std::optional<Vector> center;

  int input_dim() const;
  /// Outlyingness (RPO methods) or squared center distance (SVDD) per row.
  Vector score(const Matrix& X) const;

  void write_binary(std::ostream& out) const;
  static ModelCheckpoint read_binary(std::istream& in);
  void save(const std::string& path) const;
  static ModelCheckpoint load(const std::string& path);
};

}  // namespace drpo

#endif  // DRPO_CHECKPOINT_H_
