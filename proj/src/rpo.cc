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

#include "drpo/rpo.h"

#include <cmath>
#include <istream>
#include <ostream>

#include "drpo/binary_io.h"
#include "drpo/core_stats.h"
#include "drpo/error.h"

namespace drpo {
namespace {

constexpr std::string_view kMagic = "DRPOSTA1";

void check_stats_match(const Matrix& projected, const RpoStats& stats) {
  if (projected.cols() !=
      static_cast<Eigen::Index>(stats.count()) * stats.output_dim) {
    throw DataError("projected coordinates do not match the fitted statistics");
  }
}

}  // namespace

Estimator parse_estimator(std::string_view name) {
  if (name == "max") return Estimator::kMax;
  if (name == "mean") return Estimator::kMean;
  throw UsageError("unknown estimator '" + std::string(name) + "'");
}

std::string_view to_string(Estimator est) {
  return est == Estimator::kMax ? "max" : "mean";
}

RpoStats fit_rpo(const Matrix& x_train, const ProjectionSet& u, double eps_floor,
                 double ridge) {
  if (x_train.rows() == 0) throw DataError("empty training set");
  return fit_rpo_projected(u.project(x_train), u.output_dim(), eps_floor, ridge);
}

RpoStats fit_rpo_projected(const Matrix& projected, int output_dim,
                           double eps_floor, double ridge) {
  const Eigen::Index n = projected.rows();
  if (n == 0) throw DataError("empty training set");
  if (output_dim < 1 || projected.cols() % output_dim != 0) {
    throw DataError("projected width is not a multiple of the output dimension");
  }
  if (!(eps_floor > 0.0)) throw UsageError("eps_floor must be positive");
  const int m = output_dim;
  const int p = static_cast<int>(projected.cols() / m);

  RpoStats stats;
  stats.output_dim = m;
  stats.eps_floor = eps_floor;
  stats.ridge = ridge;
  stats.location.resize(p, m);

  std::vector<double> scratch(static_cast<std::size_t>(n));
  auto column_median = [&](Eigen::Index c) {
    Eigen::Map<Vector>(scratch.data(), n) = projected.col(c);
    return median_inplace(scratch);
  };

  if (m == 1) {
    stats.spread.resize(p);
    for (int j = 0; j < p; ++j) {
      const double med = column_median(j);
      stats.location(j, 0) = med;
      Eigen::Map<Vector>(scratch.data(), n) = projected.col(j);
      stats.spread(j) = std::max(mad_inplace(scratch, med), eps_floor);
    }
    return stats;
  }

  stats.inv_cov.reserve(static_cast<std::size_t>(p));
  const Matrix identity = Matrix::Identity(m, m);
  for (int j = 0; j < p; ++j) {
    for (int k = 0; k < m; ++k) stats.location(j, k) = column_median(j * m + k);
    const auto block = projected.middleCols(j * m, m);
    Matrix cov = Matrix::Zero(m, m);
    if (n > 1) {
      const Matrix centered = block.rowwise() - block.colwise().mean();
      cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
    }
    cov += ridge * identity;
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) {
      throw NumericError("covariance of projection " + std::to_string(j) +
                         " is not invertible after ridge");
    }
    Matrix inv = llt.solve(identity);
    stats.inv_cov.push_back((inv + inv.transpose()) / 2.0);
  }
  return stats;
}

Matrix normalized_distances(const Matrix& projected, const RpoStats& stats) {
  check_stats_match(projected, stats);
  const Eigen::Index n = projected.rows();
  const int p = stats.count();
  const int m = stats.output_dim;
  Matrix dist(n, p);
  if (m == 1) {
    for (int j = 0; j < p; ++j) {
      dist.col(j) = (projected.col(j).array() - stats.location(j, 0)).abs() /
                    stats.spread(j);
    }
    return dist;
  }
  for (int j = 0; j < p; ++j) {
    const Matrix diff =
        projected.middleCols(j * m, m).rowwise() - stats.location.row(j);
    const Matrix weighted = diff * stats.inv_cov[static_cast<std::size_t>(j)];
    // Quadratic form is nonnegative up to rounding; clamp before sqrt.
    dist.col(j) = (weighted.array() * diff.array())
                      .rowwise()
                      .sum()
                      .max(0.0)
                      .sqrt();
  }
  return dist;
}

Vector integrate(const Matrix& distances, Estimator est) {
  if (distances.cols() == 0) throw DataError("no projections to integrate");
  const Vector row_max = distances.rowwise().maxCoeff();
  if (est == Estimator::kMax) return row_max;
  // A rounded mean of equal entries can exceed their max by one ulp.
  return distances.rowwise().mean().cwiseMin(row_max);
}

double score(const Vector& x, const ProjectionSet& u, const RpoStats& stats,
             Estimator est) {
  if (x.size() != u.input_dim()) {
    throw DataError("score expects a " + std::to_string(u.input_dim()) +
                    "-vector, got " + std::to_string(x.size()));
  }
  return score_batch(x.transpose(), u, stats, est)(0);
}

Vector score_batch(const Matrix& X, const ProjectionSet& u, const RpoStats& stats,
                   Estimator est) {
  if (stats.count() != u.count() || stats.output_dim != u.output_dim()) {
    throw DataError("statistics were fitted with a different projection set");
  }
  if (X.rows() == 0) return Vector(0);
  return integrate(normalized_distances(u.project(X), stats), est);
}

double depth(double outlyingness) {
  if (!(outlyingness >= 0.0)) throw DataError("outlyingness must be nonnegative");
  return 1.0 / (1.0 + outlyingness);
}

void RpoStats::write_binary(std::ostream& out) const {
  binio::write_magic(out, kMagic);
  binio::write_pod<std::int32_t>(out, output_dim);
  binio::write_pod<double>(out, eps_floor);
  binio::write_pod<double>(out, ridge);
  binio::write_matrix(out, location);
  binio::write_matrix(out, output_dim == 1 ? Matrix(spread) : Matrix(0, 1));
  binio::write_pod<std::uint64_t>(out, inv_cov.size());
  for (const Matrix& c : inv_cov) binio::write_matrix(out, c);
}

RpoStats RpoStats::read_binary(std::istream& in) {
  binio::expect_magic(in, kMagic);
  RpoStats stats;
  stats.output_dim = binio::read_pod<std::int32_t>(in);
  stats.eps_floor = binio::read_pod<double>(in);
  stats.ridge = binio::read_pod<double>(in);
  stats.location = binio::read_matrix(in);
  const Matrix spread = binio::read_matrix(in);
  if (stats.output_dim == 1) stats.spread = spread.col(0);
  const auto n_cov = binio::read_pod<std::uint64_t>(in);
  if (n_cov > static_cast<std::uint64_t>(stats.location.rows())) {
    throw DataError("corrupt statistics block");
  }
  for (std::uint64_t j = 0; j < n_cov; ++j) stats.inv_cov.push_back(binio::read_matrix(in));
  if (stats.location.cols() != stats.output_dim ||
      (stats.output_dim == 1 && stats.spread.size() != stats.location.rows()) ||
      (stats.output_dim > 1 &&
       stats.inv_cov.size() != static_cast<std::size_t>(stats.location.rows()))) {
    throw DataError("corrupt statistics block");
  }
  return stats;
}

}  // namespace drpo
