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

#include "drpo/experiment.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <filesystem>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "drpo/error.h"
#include "drpo/metrics.h"
#include "drpo/random.h"
#include "drpo/rpo.h"

namespace drpo {
namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double auc_of(const Vector& scores, const std::vector<Label>& labels) {
  return roc_auc({scores.data(), static_cast<std::size_t>(scores.size())}, labels);
}

std::vector<int> pick_normal_classes(const ExperimentSpec& spec, const Dataset& raw,
                                     std::uint64_t seed) {
  const DataSource& src = spec.data;
  if (src.kind == DataSource::Kind::kSynthetic) {
    std::vector<int> classes(static_cast<std::size_t>(src.modes));
    for (int k = 0; k < src.modes; ++k) classes[static_cast<std::size_t>(k)] = k;
    return classes;
  }
  if (src.k_normal <= 0) {
    std::vector<int> classes = src.normal_classes;
    std::sort(classes.begin(), classes.end());
    return classes;
  }
  const std::vector<int> all = distinct_classes(raw);
  if (static_cast<std::size_t>(src.k_normal) >= all.size()) {
    throw UsageError("k_normal must leave at least one anomalous class");
  }
  Rng rng(derive_seed(seed, "classes"));
  std::vector<int> picked;
  for (std::size_t k : sample_without_replacement(
           all.size(), static_cast<std::size_t>(src.k_normal), rng)) {
    picked.push_back(all[k]);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

std::vector<int> layer_dims(const ExperimentSpec& spec, int input_dim) {
  std::vector<int> dims = {input_dim};
  dims.insert(dims.end(), spec.hidden.begin(), spec.hidden.end());
  dims.push_back(spec.latent_dim);
  return dims;
}

ProjectionSet make_projections(const ExperimentSpec& spec, int d, std::uint64_t seed) {
  ProjectionSet u = ProjectionSet::generate(d, spec.rp_dim, spec.effective_projections(),
                                            derive_seed(seed, "projections"));
  DropoutSpec dropout{spec.components_dropout, spec.projections_dropout,
                      derive_seed(seed, "dropout")};
  return apply_dropout(u, dropout);
}

}  // namespace

std::string DataSource::name() const {
  if (kind == Kind::kSynthetic) return "synthetic";
  return std::filesystem::path(path).stem().string();
}

int ExperimentSpec::effective_projections() const {
  if (n_projections > 0) return n_projections;
  if (is_deep(method) && latent_dim <= 8) return 500;
  return 1000;
}

void ExperimentSpec::validate() const {
  const DataSource& src = data;
  if (src.kind == DataSource::Kind::kSynthetic) {
    if (src.modes < 1) throw UsageError("data.modes must be at least 1");
    if (src.dim < 1 || src.n_per_mode < 1 || src.anomaly_n < 1) {
      throw UsageError("data.dim, data.n_per_mode and data.anomaly_n must be positive");
    }
  } else {
    if (src.path.empty()) throw UsageError("data.path is required for csv sources");
    if (src.k_normal <= 0 && src.normal_classes.empty()) {
      throw UsageError("data.normal_classes or data.k_normal is required");
    }
  }
  if (!(src.test_fraction > 0.0 && src.test_fraction < 1.0)) {
    throw UsageError("data.test_fraction must lie in (0, 1)");
  }
  if (!(src.val_fraction > 0.0 && src.val_fraction < 1.0)) {
    throw UsageError("data.val_fraction must lie in (0, 1)");
  }
  if (n_projections < 0) throw UsageError("projections.count must be positive");
  if (rp_dim < 1) throw UsageError("projections.dim must be at least 1");
  DropoutSpec{components_dropout, projections_dropout, 0}.validate();
  if (is_deep(method)) {
    if (latent_dim < 1) throw UsageError("model.latent_dim must be positive");
    for (int h : hidden) {
      if (h < 1) throw UsageError("model.hidden widths must be positive");
    }
    if (uses_projections(method) && rp_dim > latent_dim) {
      throw UsageError("projections.dim exceeds the latent dimension");
    }
    if (epochs < 0) throw UsageError("training.epochs must be nonnegative");
    if (batch_size < 2) throw UsageError("training.batch_size must be at least 2");
  }
  if (!(eps_floor > 0.0)) throw UsageError("model.eps_floor must be positive");
  if (!(sad_ratio >= 0.0 && sad_ratio < 0.5)) {
    throw UsageError("data.sad_ratio must lie in [0, 0.5)");
  }
  if (sad_ratio > 0.0 && method != Method::kDeepRpoMax && method != Method::kDeepRpoMean) {
    throw UsageError("data.sad_ratio requires a deep RPO method");
  }
  if (!(contamination >= 0.0 && contamination < 0.5)) {
    throw UsageError("data.contamination must lie in [0, 0.5)");
  }
  affine.validate();
  if (seeds.empty()) throw UsageError("experiment.seeds must not be empty");
  if (workers < 1) throw UsageError("experiment.workers must be at least 1");
}

Aggregate aggregate(std::span<const double> values) {
  Aggregate agg;
  agg.n = values.size();
  if (values.empty()) return agg;
  double sum = 0.0;
  for (double v : values) sum += v;
  agg.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - agg.mean) * (v - agg.mean);
  agg.std = std::sqrt(sq / static_cast<double>(values.size()));
  return agg;
}

Aggregate aggregate_test_auc(std::span<const SeedResult> results) {
  std::vector<double> aucs;
  for (const SeedResult& r : results) aucs.push_back(r.test_auc);
  return aggregate(aucs);
}

Dataset load_source(const DataSource& source) {
  if (source.kind == DataSource::Kind::kSynthetic) return {};
  if (!std::filesystem::exists(source.path)) {
    throw DataError("dataset file not found: " + source.path);
  }
  return load_csv(source.path, source.label_column, {});
}

PreparedData prepare_dataset(const ExperimentSpec& spec, std::uint64_t seed,
                             const Dataset* raw) {
  PreparedData out;
  Dataset data;
  if (spec.data.kind == DataSource::Kind::kSynthetic) {
    data = generate_multimodal(spec.data.modes, spec.data.dim, spec.data.n_per_mode,
                               spec.data.anomaly_n, derive_seed(seed, "data"));
  } else {
    Dataset loaded;
    if (raw == nullptr || raw->size() == 0) {
      loaded = load_source(spec.data);
      raw = &loaded;
    }
    out.normal_classes = pick_normal_classes(spec, *raw, seed);
    const std::vector<int> present = distinct_classes(*raw);
    for (int cls : out.normal_classes) {
      if (!std::binary_search(present.begin(), present.end(), cls)) {
        throw DataError(spec.data.path + ": unknown class id " + std::to_string(cls));
      }
    }
    data = relabel(*raw, {out.normal_classes.begin(), out.normal_classes.end()});
  }
  if (out.normal_classes.empty()) out.normal_classes = pick_normal_classes(spec, data, seed);

  data = holdout_test(data, spec.data.test_fraction, derive_seed(seed, "holdout"));
  data = split(data, spec.data.val_fraction, derive_seed(seed, "split"));
  data = contaminate(data, spec.contamination, derive_seed(seed, "contaminate"));
  data = inject_sad_labels(data, spec.sad_ratio, spec.sad_classes, derive_seed(seed, "sad"));
  if (spec.data.standardize) {
    out.standardizer = fit_standardizer(data);
    data = standardize(data, *out.standardizer);
  }
  if (!spec.affine.is_identity()) {
    AffineSpec affine = spec.affine;
    affine.seed = derive_seed(seed, "affine");
    data = affine_transform(data, affine);
  }
  out.data = std::move(data);
  return out;
}

SeedRun run_seed(const ExperimentSpec& spec, std::uint64_t seed, const Dataset* raw) {
  const auto start = std::chrono::steady_clock::now();
  PreparedData prepared = prepare_dataset(spec, seed, raw);
  const Dataset& data = prepared.data;

  SeedRun run;
  run.result.seed = seed;
  run.result.normal_classes = prepared.normal_classes;
  run.checkpoint.method = spec.method;
  run.checkpoint.standardizer = prepared.standardizer;

  const std::vector<std::size_t> val_rows = data.rows_in(Split::kVal);
  const std::vector<std::size_t> test_rows = data.rows_in(Split::kTest);
  const Matrix x_val = data.features(val_rows);
  const Matrix x_test = data.features(test_rows);
  const std::vector<Label> val_labels = data.labels(val_rows);
  const std::vector<Label> test_labels = data.labels(test_rows);
  std::vector<std::size_t> ref_rows;
  for (std::size_t i : data.rows_in(Split::kTrain)) {
    if (!data.sad_flag[i]) ref_rows.push_back(i);
  }
  const Matrix x_ref = data.features(ref_rows);

  if (!is_deep(spec.method)) {
    ProjectionSet u = make_projections(spec, data.dim(), seed);
    RpoStats stats = fit_rpo(x_ref, u, spec.eps_floor, spec.ridge);
    const Estimator est = estimator_of(spec.method);
    run.result.val_auc = auc_of(score_batch(x_val, u, stats, est), val_labels);
    run.result.test_auc = auc_of(score_batch(x_test, u, stats, est), test_labels);
    run.checkpoint.projections = std::move(u);
    run.checkpoint.stats = std::move(stats);
  } else {
    TrainConfig config;
    config.epochs = spec.epochs;
    config.batch_size = spec.batch_size;
    config.seed = derive_seed(seed, "shuffle");
    config.adam = spec.adam;
    Encoder encoder = Encoder::random_init(layer_dims(spec, data.dim()), spec.leaky_slope,
                                           derive_seed(seed, "init"));
    if (spec.method == Method::kDeepSvdd) {
      SvddModel model{encoder, init_center(encoder, x_ref), spec.adam.weight_decay};
      TrainResult<SvddModel> trained = train(model, data, config);
      run.result.best_epoch = trained.best_epoch;
      run.result.val_auc = trained.best_val_auc;
      run.result.test_auc = auc_of(svdd_scores(trained.model, x_test), test_labels);
      run.result.history = std::move(trained.history);
      run.checkpoint.encoder = std::move(trained.model.encoder);
      run.checkpoint.center = std::move(trained.model.center);
    } else {
      DeepRpoModel model{encoder,
                         make_projections(spec, spec.latent_dim, seed),
                         estimator_of(spec.method),
                         spec.adam.weight_decay,
                         spec.stats_mode,
                         spec.eps_floor,
                         spec.ridge};
      TrainResult<DeepRpoModel> trained = train(model, data, config);
      RpoStats stats = fit_latent_stats(trained.model, x_ref);
      run.result.best_epoch = trained.best_epoch;
      run.result.val_auc = trained.best_val_auc;
      run.result.test_auc =
          auc_of(deep_rpo_scores(trained.model, stats, x_test), test_labels);
      run.result.history = std::move(trained.history);
      run.checkpoint.encoder = std::move(trained.model.encoder);
      run.checkpoint.projections = std::move(trained.model.projections);
      run.checkpoint.stats = std::move(stats);
    }
  }
  run.result.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const ProgressFn& progress) {
  spec.validate();
  const Dataset raw = load_source(spec.data);
  const std::size_t n = spec.seeds.size();
  std::vector<SeedResult> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = run_seed(spec, spec.seeds[i], &raw).result;
        if (progress) {
          std::lock_guard<std::mutex> lock(progress_mutex);
          progress(results[i]);
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(spec.workers), n);
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    const std::string prefix = "seed " + std::to_string(spec.seeds[i]) + ": ";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      throw_error(e.kind(), prefix + e.what());
    } catch (const std::exception& e) {
      throw NumericError(prefix + e.what());
    }
  }
  ExperimentResult out;
  out.seeds = std::move(results);
  out.test_auc = aggregate_test_auc(out.seeds);
  return out;
}

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "n_projections") return SweepAxis::kNProjections;
  if (name == "rp_dim") return SweepAxis::kRpDim;
  if (name == "dropout") return SweepAxis::kDropout;
  if (name == "alpha") return SweepAxis::kAlpha;
  if (name == "sad_ratio") return SweepAxis::kSadRatio;
  throw UsageError("unknown sweep axis '" + std::string(name) + "'");
}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kNProjections: return "n_projections";
    case SweepAxis::kRpDim: return "rp_dim";
    case SweepAxis::kDropout: return "dropout";
    case SweepAxis::kAlpha: return "alpha";
    case SweepAxis::kSadRatio: return "sad_ratio";
  }
  return "n_projections";
}

ExperimentSpec apply_axis(const ExperimentSpec& base, SweepAxis axis,
                          std::string_view value) {
  ExperimentSpec spec = base;
  const std::string text(value);
  auto number = [&](std::string_view s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(std::string(s), &used);
      if (used != s.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw UsageError("invalid " + std::string(to_string(axis)) + " value '" + text + "'");
    }
  };
  auto integer = [&](std::string_view s) {
    const double v = number(s);
    if (v != std::floor(v) || v < 1) {
      throw UsageError("invalid " + std::string(to_string(axis)) + " value '" + text + "'");
    }
    return static_cast<int>(v);
  };
  const bool rpo = uses_projections(base.method);
  const bool deep_rpo =
      base.method == Method::kDeepRpoMax || base.method == Method::kDeepRpoMean;
  switch (axis) {
    case SweepAxis::kNProjections:
      if (!rpo) throw UsageError("axis n_projections requires an RPO method");
      spec.n_projections = integer(text);
      break;
    case SweepAxis::kRpDim:
      if (!rpo) throw UsageError("axis rp_dim requires an RPO method");
      spec.rp_dim = integer(text);
      break;
    case SweepAxis::kDropout:
      if (!rpo) throw UsageError("axis dropout requires an RPO method");
      spec.components_dropout = 0.0;
      spec.projections_dropout = 0.0;
      if (text == "none") break;
      if (text.size() > 2 && text.compare(0, 2, "c:") == 0) {
        spec.components_dropout = number(std::string_view(text).substr(2));
      } else if (text.size() > 2 && text.compare(0, 2, "p:") == 0) {
        spec.projections_dropout = number(std::string_view(text).substr(2));
      } else {
        throw UsageError("dropout values are 'none', 'c:<rate>' or 'p:<rate>'");
      }
      break;
    case SweepAxis::kAlpha:
      spec.affine = AffineSpec{};
      spec.affine.mode = AffineSpec::Mode::kConstant;
      spec.affine.alpha = number(text);
      break;
    case SweepAxis::kSadRatio:
      if (!deep_rpo) throw UsageError("axis sad_ratio requires a deep RPO method");
      spec.sad_ratio = number(text);
      break;
  }
  spec.validate();
  return spec;
}

SweepTable sweep(const ExperimentSpec& base, SweepAxis axis,
                 const std::vector<std::string>& values, const ProgressFn& progress) {
  if (values.empty()) throw UsageError("sweep needs at least one value");
  std::vector<ExperimentSpec> specs;
  for (const std::string& v : values) specs.push_back(apply_axis(base, axis, v));

  SweepTable table;
  table.axis = axis;
  table.method = base.method;
  for (std::size_t k = 0; k < values.size(); ++k) {
    table.rows.push_back({values[k], run_experiment(specs[k], progress), std::nullopt});
  }
  if (axis == SweepAxis::kAlpha) {
    const ExperimentResult* baseline = nullptr;
    ExperimentResult extra;
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (specs[k].affine.alpha == 1.0) baseline = &table.rows[k].result;
    }
    if (baseline == nullptr) {
      extra = run_experiment(apply_axis(base, axis, "1"), progress);
      baseline = &extra;
    }
    for (SweepRow& row : table.rows) {
      std::vector<double> gaps;
      for (std::size_t s = 0; s < row.result.seeds.size(); ++s) {
        gaps.push_back(row.result.seeds[s].test_auc - baseline->seeds[s].test_auc);
      }
      row.auc_gap = aggregate(gaps);
    }
  }
  return table;
}

double truncate_decimals(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  // Nudge by a few ulps so values such as 0.29 (stored as 0.28999...) keep
  // their last digit.
  return std::trunc(value * scale * (1.0 + 4 * std::numeric_limits<double>::epsilon())) /
         scale;
}

void write_results_header(std::ostream& out, bool with_axis) {
  if (with_axis) out << "axis_value,";
  out << "method,dataset,k_modes,seed,best_epoch,val_auc,test_auc\n";
}

void write_results_rows(std::ostream& out, const ExperimentSpec& spec,
                        const ExperimentResult& result,
                        std::optional<std::string_view> axis_value) {
  for (const SeedResult& r : result.seeds) {
    if (axis_value) out << *axis_value << ',';
    out << to_string(spec.method) << ',' << spec.data.name() << ','
        << r.normal_classes.size() << ',' << r.seed << ',' << r.best_epoch << ','
        << format_double(r.val_auc) << ',' << format_double(r.test_auc) << '\n';
  }
}

void write_aggregate_header(std::ostream& out, bool with_gap) {
  out << "method,axis_value,mean_auc,std_auc,n_seeds";
  if (with_gap) out << ",mean_auc_gap,std_auc_gap";
  out << '\n';
}

void write_aggregate_row(std::ostream& out, Method method, std::string_view axis_value,
                         const Aggregate& agg, const std::optional<Aggregate>& gap) {
  out << to_string(method) << ',' << axis_value << ',' << format_double(agg.mean) << ','
      << format_double(agg.std) << ',' << agg.n;
  if (gap) out << ',' << format_double(gap->mean) << ',' << format_double(gap->std);
  out << '\n';
}

void write_sweep_csv(std::ostream& results, std::ostream& aggregates,
                     const ExperimentSpec& base, const SweepTable& table) {
  const bool with_gap = table.axis == SweepAxis::kAlpha;
  write_results_header(results, true);
  write_aggregate_header(aggregates, with_gap);
  for (const SweepRow& row : table.rows) {
    write_results_rows(results, apply_axis(base, table.axis, row.axis_value), row.result,
                       row.axis_value);
    write_aggregate_row(aggregates, table.method, row.axis_value, row.result.test_auc,
                        row.auc_gap);
  }
}

}  // namespace drpo
