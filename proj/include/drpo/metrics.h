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

#ifndef DRPO_METRICS_H_
#define DRPO_METRICS_H_

#include <span>

#include "drpo/types.h"

namespace drpo {

/// Area under the ROC curve with anomalies as the
/// positive class and larger scores meaning more anomalous:
/// P(score_anomaly > score_normal) + P(tie) / 2, via midranks in O(n log n).
/// Throws DataError when either class is missing or lengths differ.
double roc_auc(std::span<const double> scores, std::span<const Label> labels);

}  // namespace drpo

#endif  // DRPO_METRICS_H_
