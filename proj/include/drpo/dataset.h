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

#ifndef DRPO_DATASET_H_
#define DRPO_DATASET_H_

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "drpo/types.h"

namespace drpo {

/// kPool holds rows not yet assigned by the protocol: the normal pool before
/// holdout_test, and afterwards the reserve of anomalies that feeds the
/// validation split, contamination and SAD labeling.
enum class Split : unsigned char { kPool = 0, kTrain, kVal, kTest };

std::string_view to_string(Split split);
Split parse_split(std::string_view name);

struct Dataset {
  Matrix X;  // n x d
  std::vector<int> class_id;
  std::vector<Label> label;
  std::vector<Split> split;
  std::vector<unsigned char> sad_flag;
  // Anomalies injected into the training split and relabeled normal. The
  // true label of these rows is anomaly.
  std::vector<unsigned char> contaminated;
  std::string provenance;

  std::size_t size() const { return static_cast<std::size_t>(X.rows()); }
  int dim() const { return static_cast<int>(X.cols()); }

  /// Row indices in `split`, ascending.
  std::vector<std::size_t> rows_in(Split split) const;
  /// Rows of X at `rows`, in order.
  Matrix features(const std::vector<std::size_t>& rows) const;
  std::vector<Label> labels(const std::vector<std::size_t>& rows) const;

  /// Checks column lengths and finiteness; throws DataError.
  void validate() const;
};

/// Builds a dataset with every row in the pool split.
Dataset make_dataset(Matrix X, std::vector<int> class_id, std::vector<Label> label,
                     std::string provenance);

struct SyntheticOptions {
  double sigma = 1.0;
  double min_mean_separation = 6.0;  // in units of sigma
  double core_radius = 3.0;          // anomalies stay this many sigma away
  double mean_half_width = 4.0;      // means drawn in [-w, w]^d (sigma units)
  double box_margin = 3.0;           // box = mean bounding box +/- margin
};

/// k Gaussian blobs (class ids 0..k-1, normal) and `anomaly_n` uniform box
/// anomalies labeled with class id k + index of their nearest blob.
Dataset generate_multimodal(int k_modes, int d, int n_per_mode, int anomaly_n,
                            std::uint64_t seed, const SyntheticOptions& opts = {});

/// The generated blob means, recomputed from the same seed.
Matrix synthetic_means(int k_modes, int d, std::uint64_t seed,
                       const SyntheticOptions& opts = {});

/// Reads a header + rows CSV. The column named `label_column` holds integer
/// class ids; every other column is a feature. Rows whose class is in
/// `normal_class_ids` are normal, the rest anomalies. All rows land in the
/// pool split. Features are left unscaled; see standardize().
Dataset load_csv(const std::string& path, std::string_view label_column,
                 const std::set<int>& normal_class_ids);
Dataset read_csv(std::istream& in, std::string_view label_column,
                 const std::set<int>& normal_class_ids,
                 std::string provenance = "stream");

/// Feature columns f0..f{d-1} then `class`.
void write_csv(std::ostream& out, const Dataset& data);
void save_csv(const std::string& path, const Dataset& data);

/// Split manifest: row_index,split,sad_flag.
void write_manifest(std::ostream& out, const Dataset& data);
void save_manifest(const std::string& path, const Dataset& data);
Dataset apply_manifest(const Dataset& data, std::istream& in);
Dataset load_manifest(const Dataset& data, const std::string& path);

/// Relabels rows by membership of their class in `normal_class_ids`.
Dataset relabel(const Dataset& data, const std::set<int>& normal_class_ids);

/// Distinct class ids, ascending.
std::vector<int> distinct_classes(const Dataset& data);

/// Moves round(test_fraction * count) pool normals and pool anomalies into
/// the test split; the remaining pool normals become the training split and
/// the remaining anomalies stay in the pool.
Dataset holdout_test(const Dataset& data, double test_fraction, std::uint64_t seed);

/// Moves round(val_fraction * |train|) training normals to the validation
/// split together with as many pool anomalies. Test rows are untouched, so
/// validation and test anomalies are disjoint.
Dataset split(const Dataset& data, double val_fraction, std::uint64_t seed);

/// Injects pool anomalies into the training split, relabeled normal, until
/// they make up `ratio` of it.
Dataset contaminate(const Dataset& data, double ratio, std::uint64_t seed);

/// Adds round(sad_ratio * |train|) labeled anomalies, drawn from
/// `n_anomalous_classes` randomly chosen anomalous classes of the pool, to
/// the training split with sad_flag set.
Dataset inject_sad_labels(const Dataset& data, double sad_ratio,
                          int n_anomalous_classes, std::uint64_t seed);

/// Per-column affine scaling from training-split statistics.
struct Standardizer {
  Vector mean;
  Vector scale;  // 1 for constant columns
};

Standardizer fit_standardizer(const Dataset& data);
Dataset standardize(const Dataset& data, const Standardizer& s);

struct AffineSpec {
  enum class Mode { kConstant, kUniformRange, kStandardNormal };
  Mode mode = Mode::kConstant;
  double alpha = 1.0;
  double lo = 1.0;
  double hi = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
  bool is_identity() const { return mode == Mode::kConstant && alpha == 1.0; }
};

AffineSpec::Mode parse_affine_mode(std::string_view name);

/// Diagonal of the affine map (length d).
Vector affine_diagonal(const AffineSpec& spec, int d);

/// Scales the validation and test rows by the diagonal of `spec`.
Dataset affine_transform(const Dataset& data, const AffineSpec& spec);

}  // namespace drpo

#endif  // DRPO_DATASET_H_
