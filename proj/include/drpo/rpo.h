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

#ifndef DRPO_RPO_H_
#define DRPO_RPO_H_

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "drpo/projections.h"
#include "drpo/types.h"

namespace drpo {

/// Reduction applied across per-projection normalized distances.
enum class Estimator { kMax, kMean };

Estimator parse_estimator(std::string_view name);
std::string_view to_string(Estimator est);

inline constexpr double kDefaultEpsFloor = 1e-6;
inline constexpr double kDefaultRidge = 1e-6;

/// Robust per-projection location and spread fitted on a reference set.
///
/// For one-dimensional projections `spread(j)` holds MAD_j clamped below at
/// `eps_floor`. For m > 1 `inv_cov[j]` holds the inverse of the projected
/// sample covariance plus `ridge * I`.
struct RpoStats {
  int output_dim = 1;
  double eps_floor = kDefaultEpsFloor;
  double ridge = kDefaultRidge;
  Matrix location;  // p x m, componentwise medians
  Vector spread;    // p, used when output_dim == 1
  std::vector<Matrix> inv_cov;  // p matrices of m x m, used when output_dim > 1

  int count() const { return static_cast<int>(location.rows()); }

  void write_binary(std::ostream& out) const;
  static RpoStats read_binary(std::istream& in);
};

/// Fits medians and spreads of every projection of `x_train`.
RpoStats fit_rpo(const Matrix& x_train, const ProjectionSet& u,
                 double eps_floor = kDefaultEpsFloor, double ridge = kDefaultRidge);

/// Same as fit_rpo, from coordinates already laid out as ProjectionSet::project
/// returns them (n x p*m).
RpoStats fit_rpo_projected(const Matrix& projected, int output_dim,
                           double eps_floor = kDefaultEpsFloor,
                           double ridge = kDefaultRidge);

/// n x p matrix of normalized distances to the per-projection locations:
/// |u^T x - MED| / MAD for m = 1, the robust Mahalanobis form for m > 1.
Matrix normalized_distances(const Matrix& projected, const RpoStats& stats);

/// Reduces each row of a distance matrix with the estimator.
Vector integrate(const Matrix& distances, Estimator est);

/// Outlyingness of one point.
double score(const Vector& x, const ProjectionSet& u, const RpoStats& stats,
             Estimator est);

/// Outlyingness of every row of X.
Vector score_batch(const Matrix& X, const ProjectionSet& u, const RpoStats& stats,
                   Estimator est);

/// Projection depth 1 / (1 + outlyingness).
double depth(double outlyingness);

}  // namespace drpo

#endif  // DRPO_RPO_H_
