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

#include "drpo/projections.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "drpo/binary_io.h"
#include "drpo/error.h"
#include "drpo/random.h"

namespace drpo {
namespace {

constexpr double kUnitNormTolerance = 1e-12;
constexpr std::string_view kMagic = "DRPOPRJ1";

void normalize_columns(Matrix& entries) {
  for (Eigen::Index c = 0; c < entries.cols(); ++c) {
    const double norm = entries.col(c).norm();
    if (!(norm > 0.0)) throw DataError("degenerate dropout");
    entries.col(c) /= norm;
  }
}

}  // namespace

void DropoutSpec::validate() const {
  if (!(components_rate >= 0.0 && components_rate < 1.0)) {
    throw UsageError("components dropout rate must lie in [0, 1)");
  }
  if (!(projections_rate >= 0.0 && projections_rate < 1.0)) {
    throw UsageError("projections dropout rate must lie in [0, 1)");
  }
}

ProjectionSet::ProjectionSet(int d, int m, int p, std::uint64_t seed,
                             Matrix entries)
    : d_(d), m_(m), p_(p), seed_(seed), entries_(std::move(entries)) {
  if (d < 1 || m < 1 || p < 1 || m > d) {
    throw UsageError("invalid projection dimensions: need d, m, p >= 1 and m <= d");
  }
  if (entries_.rows() != d || entries_.cols() != static_cast<Eigen::Index>(p) * m) {
    throw DataError("projection entries do not match (d, m, p)");
  }
  if (!entries_.allFinite()) throw DataError("non-finite projection entry");
  for (Eigen::Index c = 0; c < entries_.cols(); ++c) {
    if (std::abs(entries_.col(c).norm() - 1.0) > kUnitNormTolerance) {
      throw DataError("projection column " + std::to_string(c) +
                      " is not unit norm");
    }
  }
}

ProjectionSet ProjectionSet::generate(int d, int m, int p, std::uint64_t seed) {
  if (d < 1 || m < 1 || p < 1 || m > d) {
    throw UsageError("invalid projection dimensions: need d, m, p >= 1 and m <= d");
  }
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix entries(d, static_cast<Eigen::Index>(p) * m);
  // Column-major fill: one projection column at a time.
  for (Eigen::Index c = 0; c < entries.cols(); ++c)
    for (Eigen::Index r = 0; r < d; ++r) entries(r, c) = normal(rng);
  normalize_columns(entries);
  return ProjectionSet(d, m, p, seed, std::move(entries));
}

Matrix ProjectionSet::project(const Matrix& X) const {
  if (X.cols() != d_) {
    throw DataError("projection expects " + std::to_string(d_) +
                    " input columns, got " + std::to_string(X.cols()));
  }
  return X * entries_;
}

bool operator==(const ProjectionSet& a, const ProjectionSet& b) {
  return a.d_ == b.d_ && a.m_ == b.m_ && a.p_ == b.p_ && a.seed_ == b.seed_ &&
         a.entries_ == b.entries_;
}

void ProjectionSet::write_binary(std::ostream& out) const {
  binio::write_magic(out, kMagic);
  binio::write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(d_));
  binio::write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(m_));
  binio::write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(p_));
  binio::write_pod<std::uint64_t>(out, seed_);
  binio::write_matrix(out, entries_);
}

ProjectionSet ProjectionSet::read_binary(std::istream& in) {
  binio::expect_magic(in, kMagic);
  const auto d = static_cast<int>(binio::read_pod<std::uint64_t>(in));
  const auto m = static_cast<int>(binio::read_pod<std::uint64_t>(in));
  const auto p = static_cast<int>(binio::read_pod<std::uint64_t>(in));
  const auto seed = binio::read_pod<std::uint64_t>(in);
  return ProjectionSet(d, m, p, seed, binio::read_matrix(in));
}

void ProjectionSet::save_binary(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  write_binary(out);
  if (!out) throw DataError("write failed: " + path);
}

ProjectionSet ProjectionSet::load_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path);
  return read_binary(in);
}

// Layout: "d,m,p,seed" header, its values, then p*d rows of m values
// (projection-major, then input dimension).
void ProjectionSet::write_csv(std::ostream& out) const {
  char buf[32];
  out << "d,m,p,seed\n" << d_ << ',' << m_ << ',' << p_ << ',' << seed_ << '\n';
  for (int j = 0; j < p_; ++j) {
    for (int r = 0; r < d_; ++r) {
      for (int k = 0; k < m_; ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g", entries_(r, j * m_ + k));
        out << (k ? "," : "") << buf;
      }
      out << '\n';
    }
  }
}

ProjectionSet ProjectionSet::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "d,m,p,seed") {
    throw DataError("projection CSV: missing 'd,m,p,seed' header");
  }
  if (!std::getline(in, line)) throw DataError("projection CSV: missing sizes");
  long long d = 0, m = 0, p = 0;
  unsigned long long seed = 0;
  if (std::sscanf(line.c_str(), "%lld,%lld,%lld,%llu", &d, &m, &p, &seed) != 4) {
    throw DataError("projection CSV: malformed size line");
  }
  if (d < 1 || m < 1 || p < 1 || m > d) {
    throw DataError("projection CSV: invalid dimensions");
  }
  Matrix entries(d, p * m);
  for (long long j = 0; j < p; ++j) {
    for (long long r = 0; r < d; ++r) {
      if (!std::getline(in, line)) throw DataError("projection CSV: truncated");
      std::stringstream row(line);
      std::string cell;
      for (long long k = 0; k < m; ++k) {
        if (!std::getline(row, cell, ',')) {
          throw DataError("projection CSV: short row");
        }
        entries(r, j * m + k) = std::stod(cell);
      }
    }
  }
  return ProjectionSet(static_cast<int>(d), static_cast<int>(m),
                       static_cast<int>(p), seed, std::move(entries));
}

ProjectionSet apply_dropout(const ProjectionSet& u, const DropoutSpec& spec) {
  spec.validate();
  const int d = u.input_dim();
  const int m = u.output_dim();
  const int p = u.count();
  const auto n_drop_proj = static_cast<std::size_t>(
      std::floor(spec.projections_rate * static_cast<double>(p)));
  const auto n_drop_comp = static_cast<std::size_t>(
      std::floor(spec.components_rate * static_cast<double>(d)));
  if (n_drop_proj == 0 && n_drop_comp == 0) return u;

  Rng rng(spec.seed);
  std::vector<std::size_t> dropped =
      sample_without_replacement(static_cast<std::size_t>(p), n_drop_proj, rng);
  std::vector<bool> keep(static_cast<std::size_t>(p), true);
  for (std::size_t j : dropped) keep[j] = false;
  const int p_kept = p - static_cast<int>(n_drop_proj);
  if (p_kept < 1) throw DataError("degenerate dropout");

  Matrix entries(d, static_cast<Eigen::Index>(p_kept) * m);
  int out_j = 0;
  for (int j = 0; j < p; ++j) {
    if (!keep[static_cast<std::size_t>(j)]) continue;
    entries.middleCols(out_j * m, m) = u.projection(j);
    ++out_j;
  }
  if (n_drop_comp > 0) {
    for (std::size_t r :
         sample_without_replacement(static_cast<std::size_t>(d), n_drop_comp, rng)) {
      entries.row(static_cast<Eigen::Index>(r)).setZero();
    }
    normalize_columns(entries);
  }
  return ProjectionSet(d, m, p_kept, u.seed(), std::move(entries));
}

}  // namespace drpo
