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

#include "drpo/dataset.h"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "drpo/error.h"
#include "drpo/random.h"

namespace drpo {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) fields.push_back(cell);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return errno == 0 && end == text.c_str() + text.size() && std::isfinite(out);
}

bool parse_int(const std::string& text, int& out) {
  double value = 0.0;
  if (!parse_double(text, value) || value != std::floor(value) ||
      std::abs(value) > 2e9) {
    return false;
  }
  out = static_cast<int>(value);
  return true;
}

bool is_plain_train_normal(const Dataset& data, std::size_t i) {
  return data.split[i] == Split::kTrain && data.label[i] == Label::kNormal &&
         !data.sad_flag[i] && !data.contaminated[i];
}

std::vector<std::size_t> pool_rows(const Dataset& data, Label label) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.split[i] == Split::kPool && data.label[i] == label) rows.push_back(i);
  }
  return rows;
}

std::size_t round_count(double x) {
  return static_cast<std::size_t>(std::llround(x));
}

}  // namespace

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kPool: return "pool";
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "pool";
}

Split parse_split(std::string_view name) {
  if (name == "pool") return Split::kPool;
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw DataError("unknown split '" + std::string(name) + "'");
}

std::vector<std::size_t> Dataset::rows_in(Split s) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < size(); ++i) {
    if (split[i] == s) rows.push_back(i);
  }
  return rows;
}

Matrix Dataset::features(const std::vector<std::size_t>& rows) const {
  Matrix out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) = X.row(static_cast<Eigen::Index>(rows[r]));
  }
  return out;
}

std::vector<Label> Dataset::labels(const std::vector<std::size_t>& rows) const {
  std::vector<Label> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(label[r]);
  return out;
}

void Dataset::validate() const {
  const std::size_t n = size();
  if (class_id.size() != n || label.size() != n || split.size() != n ||
      sad_flag.size() != n || contaminated.size() != n) {
    throw DataError("dataset columns have inconsistent lengths");
  }
  if (!X.allFinite()) throw DataError("dataset contains non-finite features");
}

Dataset make_dataset(Matrix X, std::vector<int> class_id, std::vector<Label> label,
                     std::string provenance) {
  Dataset data;
  const auto n = static_cast<std::size_t>(X.rows());
  data.X = std::move(X);
  data.class_id = std::move(class_id);
  data.label = std::move(label);
  data.split.assign(n, Split::kPool);
  data.sad_flag.assign(n, 0);
  data.contaminated.assign(n, 0);
  data.provenance = std::move(provenance);
  data.validate();
  return data;
}

Matrix synthetic_means(int k_modes, int d, std::uint64_t seed,
                       const SyntheticOptions& opts) {
  if (k_modes < 1 || d < 1) throw UsageError("need at least one mode and one dimension");
  Rng rng(derive_seed(seed, "synthetic/means"));
  std::uniform_real_distribution<double> coord(-opts.mean_half_width * opts.sigma,
                                               opts.mean_half_width * opts.sigma);
  Matrix means(k_modes, d);
  const double min_dist = opts.min_mean_separation * opts.sigma;
  constexpr int kMaxAttempts = 100000;
  for (int k = 0; k < k_modes; ++k) {
    int attempt = 0;
    for (;; ++attempt) {
      if (attempt == kMaxAttempts) {
        throw UsageError("cannot place " + std::to_string(k_modes) +
                         " separated modes in dimension " + std::to_string(d));
      }
      for (int c = 0; c < d; ++c) means(k, c) = coord(rng);
      bool ok = true;
      for (int q = 0; q < k && ok; ++q) {
        ok = (means.row(k) - means.row(q)).norm() >= min_dist;
      }
      if (ok) break;
    }
  }
  return means;
}

Dataset generate_multimodal(int k_modes, int d, int n_per_mode, int anomaly_n,
                            std::uint64_t seed, const SyntheticOptions& opts) {
  if (k_modes < 1) throw UsageError("--modes must be at least 1");
  if (d < 1 || n_per_mode < 1 || anomaly_n < 0) {
    throw UsageError("invalid synthetic dataset sizes");
  }
  const Matrix means = synthetic_means(k_modes, d, seed, opts);
  const int n_normal = k_modes * n_per_mode;
  const int n = n_normal + anomaly_n;
  Matrix X(n, d);
  std::vector<int> class_id(static_cast<std::size_t>(n));
  std::vector<Label> label(static_cast<std::size_t>(n), Label::kNormal);

  Rng rng(derive_seed(seed, "synthetic/points"));
  std::normal_distribution<double> normal(0.0, opts.sigma);
  int row = 0;
  for (int k = 0; k < k_modes; ++k) {
    for (int i = 0; i < n_per_mode; ++i, ++row) {
      for (int c = 0; c < d; ++c) X(row, c) = means(k, c) + normal(rng);
      class_id[static_cast<std::size_t>(row)] = k;
    }
  }

  const RowVector lo = means.colwise().minCoeff().array() - opts.box_margin * opts.sigma;
  const RowVector hi = means.colwise().maxCoeff().array() + opts.box_margin * opts.sigma;
  const double core = opts.core_radius * opts.sigma;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr int kMaxAttempts = 1000000;
  int attempts = 0;
  while (row < n) {
    if (++attempts > kMaxAttempts) {
      throw UsageError("anomaly box is almost entirely covered by mode cores");
    }
    RowVector x(d);
    for (int c = 0; c < d; ++c) x(c) = lo(c) + (hi(c) - lo(c)) * unit(rng);
    int nearest = 0;
    double nearest_dist = (x - means.row(0)).norm();
    for (int k = 1; k < k_modes; ++k) {
      const double dist = (x - means.row(k)).norm();
      if (dist < nearest_dist) {
        nearest_dist = dist;
        nearest = k;
      }
    }
    if (nearest_dist < core) continue;
    X.row(row) = x;
    class_id[static_cast<std::size_t>(row)] = k_modes + nearest;
    label[static_cast<std::size_t>(row)] = Label::kAnomaly;
    ++row;
  }

  char desc[128];
  std::snprintf(desc, sizeof(desc), "synthetic(modes=%d,dim=%d,seed=%llu)", k_modes, d,
                static_cast<unsigned long long>(seed));
  return make_dataset(std::move(X), std::move(class_id), std::move(label), desc);
}

Dataset read_csv(std::istream& in, std::string_view label_column,
                 const std::set<int>& normal_class_ids, std::string provenance) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(provenance + ": empty file");
  const std::vector<std::string> header = split_fields(line);
  int label_idx = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (trim(header[c]) == label_column) label_idx = static_cast<int>(c);
  }
  if (label_idx < 0) {
    throw DataError(provenance + ": label column '" + std::string(label_column) +
                    "' not found");
  }
  const std::size_t width = header.size();
  const std::size_t d = width - 1;
  if (d == 0) throw DataError(provenance + ": no feature columns");

  std::vector<double> values;
  std::vector<int> class_id;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != width) {
      throw DataError(provenance + ": line " + std::to_string(line_no) + ": expected " +
                      std::to_string(width) + " fields, got " +
                      std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < width; ++c) {
      const std::string cell = trim(fields[c]);
      if (static_cast<int>(c) == label_idx) {
        int cls = 0;
        if (!parse_int(cell, cls)) {
          throw DataError(provenance + ": line " + std::to_string(line_no) +
                          ": class id '" + cell + "' is not an integer");
        }
        class_id.push_back(cls);
      } else {
        double v = 0.0;
        if (!parse_double(cell, v)) {
          throw DataError(provenance + ": line " + std::to_string(line_no) +
                          ": bad numeric value '" + cell + "'");
        }
        values.push_back(v);
      }
    }
  }
  if (class_id.empty()) throw DataError(provenance + ": no data rows");

  const std::set<int> present(class_id.begin(), class_id.end());
  for (int cls : normal_class_ids) {
    if (!present.count(cls)) {
      throw DataError(provenance + ": unknown class id " + std::to_string(cls));
    }
  }
  const auto n = static_cast<Eigen::Index>(class_id.size());
  Matrix X(n, static_cast<Eigen::Index>(d));
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < X.cols(); ++c)
      X(r, c) = values[static_cast<std::size_t>(r) * d + static_cast<std::size_t>(c)];
  std::vector<Label> label;
  label.reserve(class_id.size());
  for (int cls : class_id) {
    label.push_back(normal_class_ids.count(cls) ? Label::kNormal : Label::kAnomaly);
  }
  return make_dataset(std::move(X), std::move(class_id), std::move(label),
                      std::move(provenance));
}

Dataset load_csv(const std::string& path, std::string_view label_column,
                 const std::set<int>& normal_class_ids) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset: " + path);
  return read_csv(in, label_column, normal_class_ids, path);
}

void write_csv(std::ostream& out, const Dataset& data) {
  data.validate();
  for (int c = 0; c < data.dim(); ++c) out << 'f' << c << ',';
  out << "class\n";
  char buf[32];
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (int c = 0; c < data.dim(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", data.X(static_cast<Eigen::Index>(i), c));
      out << buf << ',';
    }
    out << data.class_id[i] << '\n';
  }
}

void save_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  write_csv(out, data);
  if (!out) throw DataError("write failed: " + path);
}

void write_manifest(std::ostream& out, const Dataset& data) {
  out << "row_index,split,sad_flag\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << i << ',' << to_string(data.split[i]) << ',' << int{data.sad_flag[i]} << '\n';
  }
}

void save_manifest(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  write_manifest(out, data);
  if (!out) throw DataError("write failed: " + path);
}

Dataset apply_manifest(const Dataset& data, std::istream& in) {
  Dataset out = data;
  std::string line;
  if (!std::getline(in, line) || trim(line) != "row_index,split,sad_flag") {
    throw DataError("manifest: missing 'row_index,split,sad_flag' header");
  }
  std::vector<bool> seen(data.size(), false);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(trim(line));
    int row = 0;
    int flag = 0;
    if (fields.size() != 3 || !parse_int(fields[0], row) || !parse_int(fields[2], flag) ||
        row < 0 || static_cast<std::size_t>(row) >= data.size() || (flag != 0 && flag != 1)) {
      throw DataError("manifest: malformed line " + std::to_string(line_no));
    }
    const auto r = static_cast<std::size_t>(row);
    if (seen[r]) throw DataError("manifest: duplicate row " + std::to_string(row));
    seen[r] = true;
    out.split[r] = parse_split(fields[1]);
    out.sad_flag[r] = static_cast<unsigned char>(flag);
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw DataError("manifest does not cover every row");
  }
  return out;
}

Dataset load_manifest(const Dataset& data, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest: " + path);
  return apply_manifest(data, in);
}

Dataset relabel(const Dataset& data, const std::set<int>& normal_class_ids) {
  Dataset out = data;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.label[i] = normal_class_ids.count(out.class_id[i]) ? Label::kNormal
                                                           : Label::kAnomaly;
  }
  return out;
}

std::vector<int> distinct_classes(const Dataset& data) {
  const std::set<int> classes(data.class_id.begin(), data.class_id.end());
  return {classes.begin(), classes.end()};
}

Dataset holdout_test(const Dataset& data, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw UsageError("test fraction must lie in (0, 1)");
  }
  Dataset out = data;
  Rng rng(seed);
  const std::vector<std::size_t> normals = pool_rows(data, Label::kNormal);
  const std::vector<std::size_t> anomalies = pool_rows(data, Label::kAnomaly);
  for (std::size_t i : normals) out.split[i] = Split::kTrain;
  for (std::size_t k : sample_without_replacement(
           normals.size(), round_count(test_fraction * normals.size()), rng)) {
    out.split[normals[k]] = Split::kTest;
  }
  for (std::size_t k : sample_without_replacement(
           anomalies.size(), round_count(test_fraction * anomalies.size()), rng)) {
    out.split[anomalies[k]] = Split::kTest;
  }
  return out;
}

Dataset split(const Dataset& data, double val_fraction, std::uint64_t seed) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw UsageError("validation fraction must lie in (0, 1)");
  }
  Dataset out = data;
  Rng rng(seed);
  std::vector<std::size_t> train_normals;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (is_plain_train_normal(data, i)) train_normals.push_back(i);
  }
  const std::size_t n_val = round_count(val_fraction * train_normals.size());
  const std::vector<std::size_t> anomalies = pool_rows(data, Label::kAnomaly);
  if (anomalies.size() < n_val) {
    throw DataError("insufficient anomalies for disjoint val/test pools: need " +
                    std::to_string(n_val) + ", have " + std::to_string(anomalies.size()));
  }
  for (std::size_t k : sample_without_replacement(train_normals.size(), n_val, rng)) {
    out.split[train_normals[k]] = Split::kVal;
  }
  for (std::size_t k : sample_without_replacement(anomalies.size(), n_val, rng)) {
    out.split[anomalies[k]] = Split::kVal;
  }
  return out;
}

Dataset contaminate(const Dataset& data, double ratio, std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio < 0.5)) {
    throw UsageError("contamination ratio must lie in [0, 0.5)");
  }
  if (ratio == 0.0) return data;
  const std::size_t train_n = data.rows_in(Split::kTrain).size();
  const std::size_t n_add =
      round_count(ratio * static_cast<double>(train_n) / (1.0 - ratio));
  const std::vector<std::size_t> anomalies = pool_rows(data, Label::kAnomaly);
  if (anomalies.size() < n_add) {
    throw DataError("insufficient anomaly pool for contamination: need " +
                    std::to_string(n_add) + ", have " + std::to_string(anomalies.size()));
  }
  Dataset out = data;
  Rng rng(seed);
  for (std::size_t k : sample_without_replacement(anomalies.size(), n_add, rng)) {
    const std::size_t i = anomalies[k];
    out.split[i] = Split::kTrain;
    out.label[i] = Label::kNormal;
    out.contaminated[i] = 1;
  }
  return out;
}

Dataset inject_sad_labels(const Dataset& data, double sad_ratio,
                          int n_anomalous_classes, std::uint64_t seed) {
  if (!(sad_ratio >= 0.0 && sad_ratio < 0.5)) {
    throw UsageError("SAD ratio must lie in [0, 0.5)");
  }
  if (n_anomalous_classes < 1) throw UsageError("need at least one anomalous class");
  if (sad_ratio == 0.0) return data;
  const std::size_t n_flag =
      round_count(sad_ratio * static_cast<double>(data.rows_in(Split::kTrain).size()));
  if (n_flag == 0) return data;

  const std::vector<std::size_t> anomalies = pool_rows(data, Label::kAnomaly);
  std::set<int> pool_classes;
  for (std::size_t i : anomalies) pool_classes.insert(data.class_id[i]);
  const std::vector<int> classes(pool_classes.begin(), pool_classes.end());
  Rng rng(seed);
  const std::size_t n_pick =
      std::min(classes.size(), static_cast<std::size_t>(n_anomalous_classes));
  std::set<int> picked;
  for (std::size_t k : sample_without_replacement(classes.size(), n_pick, rng)) {
    picked.insert(classes[k]);
  }
  std::vector<std::size_t> candidates;
  for (std::size_t i : anomalies) {
    if (picked.count(data.class_id[i])) candidates.push_back(i);
  }
  if (candidates.size() < n_flag) {
    throw DataError("insufficient anomaly pool for SAD labels: need " +
                    std::to_string(n_flag) + ", have " + std::to_string(candidates.size()));
  }
  Dataset out = data;
  for (std::size_t k : sample_without_replacement(candidates.size(), n_flag, rng)) {
    const std::size_t i = candidates[k];
    out.split[i] = Split::kTrain;
    out.sad_flag[i] = 1;
  }
  return out;
}

Standardizer fit_standardizer(const Dataset& data) {
  const std::vector<std::size_t> rows = data.rows_in(Split::kTrain);
  if (rows.empty()) throw DataError("cannot standardize without training rows");
  const Matrix train = data.features(rows);
  Standardizer s;
  s.mean = train.colwise().mean().transpose();
  const Matrix centered = train.rowwise() - s.mean.transpose();
  s.scale = (centered.array().square().colwise().sum() /
             static_cast<double>(train.rows()))
                .sqrt()
                .transpose();
  for (Eigen::Index c = 0; c < s.scale.size(); ++c) {
    if (!(s.scale(c) > 1e-12)) s.scale(c) = 1.0;
  }
  return s;
}

Dataset standardize(const Dataset& data, const Standardizer& s) {
  if (s.mean.size() != data.dim() || s.scale.size() != data.dim()) {
    throw DataError("standardizer width does not match the dataset");
  }
  Dataset out = data;
  out.X = ((data.X.rowwise() - s.mean.transpose()).array().rowwise() /
           s.scale.transpose().array())
              .matrix();
  return out;
}

void AffineSpec::validate() const {
  if (mode == Mode::kConstant && (alpha == 0.0 || !std::isfinite(alpha))) {
    throw UsageError("affine alpha must be finite and nonzero");
  }
  if (mode == Mode::kUniformRange && !(lo <= hi)) {
    throw UsageError("affine range needs lo <= hi");
  }
}

AffineSpec::Mode parse_affine_mode(std::string_view name) {
  if (name == "constant") return AffineSpec::Mode::kConstant;
  if (name == "uniform_range" || name == "uniform") return AffineSpec::Mode::kUniformRange;
  if (name == "standard_normal" || name == "normal") return AffineSpec::Mode::kStandardNormal;
  throw UsageError("unknown affine mode '" + std::string(name) + "'");
}

Vector affine_diagonal(const AffineSpec& spec, int d) {
  spec.validate();
  Vector g(d);
  Rng rng(spec.seed);
  switch (spec.mode) {
    case AffineSpec::Mode::kConstant:
      g.setConstant(spec.alpha);
      break;
    case AffineSpec::Mode::kUniformRange: {
      std::uniform_real_distribution<double> uniform(spec.lo, spec.hi);
      for (int c = 0; c < d; ++c) g(c) = spec.lo == spec.hi ? spec.lo : uniform(rng);
      break;
    }
    case AffineSpec::Mode::kStandardNormal: {
      std::normal_distribution<double> normal(0.0, 1.0);
      for (int c = 0; c < d; ++c) g(c) = normal(rng);
      break;
    }
  }
  return g;
}

Dataset affine_transform(const Dataset& data, const AffineSpec& spec) {
  const Vector g = affine_diagonal(spec, data.dim());
  Dataset out = data;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.split[i] == Split::kVal || out.split[i] == Split::kTest) {
      const auto r = static_cast<Eigen::Index>(i);
      out.X.row(r) = out.X.row(r).cwiseProduct(g.transpose());
    }
  }
  return out;
}

}  // namespace drpo
