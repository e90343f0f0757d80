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

#ifndef DRPO_PROJECTIONS_H_
#define DRPO_PROJECTIONS_H_

#include <cstdint>
#include <iosfwd>
#include <string>

#include "drpo/types.h"

namespace drpo {

/// Rates of the two random-projection dropouts. A fixed mask is drawn once
/// per run from `seed`.
struct DropoutSpec {
  double components_rate = 0.0;   // fraction of the d input dimensions zeroed
  double projections_rate = 0.0;  // fraction of the p projections removed
  std::uint64_t seed = 0;

  void validate() const;
};

/// A set of p random projections R^d -> R^m.
///
/// Stored as a d x (p*m) matrix whose columns [j*m, (j+1)*m) form projection
/// j. With m = 1 every projection vector has unit Euclidean norm; with m > 1
/// each of the m columns does. Immutable once built.
class ProjectionSet {
 public:
  /// Validates shape, finiteness and the unit-norm convention.
  ProjectionSet(int d, int m, int p, std::uint64_t seed, Matrix entries);

  /// Standard normal entries, then column normalization. Deterministic in
  /// `seed` within one build.
  static ProjectionSet generate(int d, int m, int p, std::uint64_t seed);

  int input_dim() const { return d_; }
  int output_dim() const { return m_; }
  int count() const { return p_; }
  std::uint64_t seed() const { return seed_; }
  const Matrix& entries() const { return entries_; }

  /// d x m block for projection j.
  auto projection(int j) const { return entries_.middleCols(j * m_, m_); }

  /// Applies every projection to every row of X (n x d). The result is
  /// n x (p*m); entry (i, j*m + k) is the k-th coordinate of u_j^T x_i.
  Matrix project(const Matrix& X) const;

  void write_binary(std::ostream& out) const;
  static ProjectionSet read_binary(std::istream& in);
  void save_binary(const std::string& path) const;
  static ProjectionSet load_binary(const std::string& path);

  void write_csv(std::ostream& out) const;
  static ProjectionSet read_csv(std::istream& in);

  friend bool operator==(const ProjectionSet& a, const ProjectionSet& b);

 private:
  int d_;
  int m_;
  int p_;
  std::uint64_t seed_;
  Matrix entries_;
};

/// Removes floor(projections_rate * p) whole projections, then zeroes the
/// same floor(components_rate * d) input dimensions in every survivor and
/// renormalizes columns. Throws DataError("degenerate dropout") when a
/// surviving column becomes all-zero.
ProjectionSet apply_dropout(const ProjectionSet& u, const DropoutSpec& spec);

}  // namespace drpo

#endif  // DRPO_PROJECTIONS_H_
