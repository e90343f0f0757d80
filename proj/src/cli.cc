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

#include "drpo/cli.h"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "drpo/checkpoint.h"
#include "drpo/config.h"
#include "drpo/dataset.h"
#include "drpo/error.h"
#include "drpo/experiment.h"
#include "drpo/random.h"
#include "drpo/rpo.h"
#include "drpo/trainers.h"

namespace drpo::cli {
namespace {

// Writes through a sibling temporary file so that failed runs never leave
// partial outputs behind.
class AtomicFile {
 public:
  explicit AtomicFile(std::string path)
      : path_(std::move(path)), tmp_(path_ + ".tmp"), out_(tmp_, std::ios::binary) {
    if (!out_) throw DataError("cannot open for writing: " + path_);
  }
  ~AtomicFile() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      std::filesystem::remove(tmp_, ec);
    }
  }
  std::ostream& stream() { return out_; }
  void commit() {
    out_.close();
    if (!out_) throw DataError("write failed: " + path_);
    std::filesystem::rename(tmp_, path_);
    committed_ = true;
  }

 private:
  std::string path_;
  std::string tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

void log_seed(std::ostream& log, const ExperimentSpec& spec, const SeedResult& r) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "[%s] seed %llu: best_epoch=%d val_auc=%.4f test_auc=%.4f (%.2fs)",
                std::string(to_string(spec.method)).c_str(),
                static_cast<unsigned long long>(r.seed), r.best_epoch, r.val_auc,
                r.test_auc, r.wall_time);
  log << buf << std::endl;
}

void apply_seed_override(ExperimentSpec& spec, int n_seeds) {
  if (n_seeds <= 0) return;
  const auto n = static_cast<std::size_t>(n_seeds);
  if (n <= spec.seeds.size()) {
    spec.seeds.resize(n);
  } else {
    spec.seeds.clear();
    for (std::uint64_t s = 0; s < n; ++s) spec.seeds.push_back(s);
  }
}

// Plain numeric CSV with a header; a column named `drop_column` is ignored.
Matrix read_feature_csv(const std::string& path, const std::string& drop_column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input: " + path);
  std::string line;
  if (!std::getline(in, line)) return Matrix(0, 0);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  int drop = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    std::string name = header[c];
    name.erase(std::remove_if(name.begin(), name.end(), ::isspace), name.end());
    if (name == drop_column) drop = static_cast<int>(c);
  }
  const std::size_t width = header.size() - (drop >= 0 ? 1 : 0);
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    std::size_t kept = 0;
    while (std::getline(ss, cell, ',')) {
      if (static_cast<int>(c++) == drop) continue;
      errno = 0;
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || errno != 0 || *end != '\0' || !std::isfinite(v)) {
        throw DataError(path + ": line " + std::to_string(line_no) +
                        ": bad numeric value '" + cell + "'");
      }
      values.push_back(v);
      ++kept;
    }
    if (kept != width) {
      throw DataError(path + ": line " + std::to_string(line_no) + ": expected " +
                      std::to_string(width) + " features, got " + std::to_string(kept));
    }
    ++rows;
  }
  Matrix X(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < width; ++c)
      X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r * width + c];
  return X;
}

int cmd_gen_data(int modes, int dim, int n_per_mode, int anomalies, std::uint64_t seed,
                 double test_fraction, double val_fraction, const std::string& out_prefix,
                 std::ostream& log) {
  Dataset data = generate_multimodal(modes, dim, n_per_mode, anomalies, seed);
  data = holdout_test(data, test_fraction, derive_seed(seed, "holdout"));
  data = split(data, val_fraction, derive_seed(seed, "split"));
  const std::string data_path = out_prefix + ".csv";
  const std::string manifest_path = out_prefix + ".manifest.csv";
  AtomicFile data_file(data_path);
  AtomicFile manifest_file(manifest_path);
  write_csv(data_file.stream(), data);
  write_manifest(manifest_file.stream(), data);
  data_file.commit();
  manifest_file.commit();
  log << "wrote " << data.size() << " rows (normal classes 0.." << modes - 1 << ") to "
      << data_path << " and " << manifest_path << std::endl;
  return kOk;
}

void require_single_method(const RunConfig& cfg, const char* command) {
  if (cfg.methods.size() != 1) {
    throw UsageError(std::string("config key experiment.method: ") + command +
                     " takes a single method");
  }
}

int cmd_bench(const std::string& config_path, int n_seeds, int workers, std::ostream& log) {
  RunConfig cfg = load_config(config_path);
  apply_seed_override(cfg.spec, n_seeds);
  if (workers > 0) cfg.spec.workers = workers;
  std::vector<ExperimentSpec> specs;
  for (Method method : cfg.methods) {
    ExperimentSpec spec = cfg.spec;
    spec.method = method;
    spec.validate();
    specs.push_back(std::move(spec));
  }
  cfg.validate_paths();

  std::vector<ExperimentResult> results;
  for (const ExperimentSpec& spec : specs) {
    results.push_back(
        run_experiment(spec, [&](const SeedResult& r) { log_seed(log, spec, r); }));
  }

  AtomicFile results_file(cfg.results_path);
  AtomicFile aggregate_file(cfg.aggregate_path);
  write_results_header(results_file.stream(), false);
  write_aggregate_header(aggregate_file.stream(), false);
  for (std::size_t k = 0; k < specs.size(); ++k) {
    write_results_rows(results_file.stream(), specs[k], results[k]);
    write_aggregate_row(aggregate_file.stream(), specs[k].method, "-", results[k].test_auc);
  }
  results_file.commit();
  aggregate_file.commit();
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const Aggregate& agg = results[k].test_auc;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%s: mean test AUC %.2f +/- %.2f over %zu seeds",
                  std::string(to_string(specs[k].method)).c_str(),
                  truncate_decimals(100.0 * agg.mean, 2),
                  truncate_decimals(100.0 * agg.std, 2), agg.n);
    log << buf << std::endl;
  }
  return kOk;
}

int cmd_sweep(const std::string& config_path, const std::string& axis_override,
              const std::vector<std::string>& values_override, int n_seeds, int workers,
              std::ostream& log) {
  RunConfig cfg = load_config(config_path);
  apply_seed_override(cfg.spec, n_seeds);
  if (workers > 0) cfg.spec.workers = workers;
  if (!axis_override.empty()) cfg.sweep_axis = parse_sweep_axis(axis_override);
  if (!values_override.empty()) cfg.sweep_values = values_override;
  if (!cfg.sweep_axis) throw UsageError("sweep needs [sweep] axis or --axis");
  require_single_method(cfg, "sweep");
  cfg.spec.validate();
  cfg.validate_paths();
  const ExperimentSpec& spec = cfg.spec;
  const SweepTable table =
      sweep(spec, *cfg.sweep_axis, cfg.sweep_values,
            [&](const SeedResult& r) { log_seed(log, spec, r); });
  AtomicFile results(cfg.results_path);
  AtomicFile aggregate(cfg.aggregate_path);
  write_sweep_csv(results.stream(), aggregate.stream(), spec, table);
  results.commit();
  aggregate.commit();
  log << "sweep over " << to_string(table.axis) << ": " << table.rows.size()
      << " rows written to " << cfg.aggregate_path << std::endl;
  return kOk;
}

int cmd_train(const std::string& config_path, std::uint64_t seed_override, bool has_seed,
              std::ostream& log) {
  RunConfig cfg = load_config(config_path);
  require_single_method(cfg, "train");
  cfg.spec.validate();
  cfg.validate_paths();
  if (cfg.checkpoint_path.empty()) {
    throw UsageError("config key output.checkpoint: required by train");
  }
  const std::uint64_t seed = has_seed ? seed_override : cfg.spec.seeds.front();
  const Dataset raw = load_source(cfg.spec.data);
  const SeedRun run = run_seed(cfg.spec, seed, &raw);
  log_seed(log, cfg.spec, run.result);
  AtomicFile ckpt(cfg.checkpoint_path);
  run.checkpoint.write_binary(ckpt.stream());
  if (!cfg.history_path.empty()) {
    AtomicFile history(cfg.history_path);
    write_history_csv(history.stream(), run.result.history);
    history.commit();
  }
  ckpt.commit();
  return kOk;
}

int cmd_score(const std::string& model_path, const std::string& input_path,
              const std::string& output_path, const std::string& label_column,
              std::ostream& log) {
  const ModelCheckpoint model = ModelCheckpoint::load(model_path);
  const Matrix X = read_feature_csv(input_path, label_column);
  Vector scores(0);
  if (X.rows() > 0) scores = model.score(X);
  AtomicFile out(output_path);
  out.stream() << "score,depth\n";
  char buf[64];
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", scores(i), depth(scores(i)));
    out.stream() << buf;
  }
  out.commit();
  log << "scored " << scores.size() << " rows" << std::endl;
  return kOk;
}

int cmd_report(const std::string& aggregate_path, std::ostream& out) {
  std::ifstream in(aggregate_path);
  if (!in) throw DataError("cannot open aggregate CSV: " + aggregate_path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(aggregate_path + ": empty file");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) header.push_back(c);
  }
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError(aggregate_path + ": missing column " + name);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_method = column("method");
  const std::size_t c_axis = column("axis_value");
  const std::size_t c_mean = column("mean_auc");
  const std::size_t c_std = column("std_auc");
  const std::size_t c_n = column("n_seeds");
  const auto gap_it = std::find(header.begin(), header.end(), "mean_auc_gap");
  const bool has_gap = gap_it != header.end();

  out << std::left << std::setw(16) << "method" << std::setw(12) << "value"
      << "test AUC (truncated mean +/- std)";
  if (has_gap) out << "   AUC gap";
  out << "   seeds\n";
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) f.push_back(c);
    if (f.size() != header.size()) {
      throw DataError(aggregate_path + ": line " + std::to_string(line_no) + ": bad width");
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%6.2f +/- %5.2f", truncate_decimals(100.0 * std::stod(f[c_mean]), 2),
                  truncate_decimals(100.0 * std::stod(f[c_std]), 2));
    out << std::setw(16) << f[c_method] << std::setw(12) << f[c_axis] << std::setw(34)
        << buf;
    if (has_gap) {
      const std::size_t g = static_cast<std::size_t>(gap_it - header.begin());
      std::snprintf(buf, sizeof(buf), "%+.2f +/- %.2f",
                    truncate_decimals(100.0 * std::stod(f[g]), 2),
                    truncate_decimals(100.0 * std::stod(f[g + 1]), 2));
      out << "   " << buf;
    }
    out << "   " << f[c_n] << '\n';
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& log) {
  CLI::App app{"Random projection outlyingness anomaly detection benchmark", "drpo"};
  app.require_subcommand(1);

  int modes = 2, dim = 16, n_per_mode = 500, anomalies = 400;
  std::uint64_t seed = 0;
  double test_fraction = 0.3, val_fraction = 0.1;
  std::string out_prefix = "synthetic";
  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic multimodal dataset");
  gen->add_option("--modes", modes, "Number of normal Gaussian modes")->check(CLI::PositiveNumber);
  gen->add_option("--dim", dim, "Feature dimension")->check(CLI::PositiveNumber);
  gen->add_option("--n-per-mode", n_per_mode, "Normal rows per mode")->check(CLI::PositiveNumber);
  gen->add_option("--anomalies", anomalies, "Number of box anomalies")->check(CLI::NonNegativeNumber);
  gen->add_option("--seed", seed, "Generator seed");
  gen->add_option("--test-fraction", test_fraction, "Fraction held out for testing");
  gen->add_option("--val-fraction", val_fraction, "Fraction of training normals used for validation");
  gen->add_option("--out", out_prefix, "Output prefix for <prefix>.csv and <prefix>.manifest.csv");

  std::string config_path;
  int n_seeds = 0;
  int workers = 0;
  auto* bench = app.add_subcommand("bench", "Run a multi-seed experiment from a config file");
  bench->add_option("config", config_path, "Run configuration")->required();
  bench->add_option("--seeds", n_seeds, "Run only this many seeds")->check(CLI::PositiveNumber);
  bench->add_option("--workers", workers, "Parallel seed workers")->check(CLI::PositiveNumber);

  std::string axis;
  std::vector<std::string> values;
  auto* sw = app.add_subcommand("sweep", "Run an experiment for each value of one axis");
  sw->add_option("config", config_path, "Run configuration")->required();
  sw->add_option("--axis", axis, "n_projections, rp_dim, dropout, alpha or sad_ratio");
  sw->add_option("--values", values, "Axis values")->delimiter(',');
  sw->add_option("--seeds", n_seeds, "Run only this many seeds")->check(CLI::PositiveNumber);
  sw->add_option("--workers", workers, "Parallel seed workers")->check(CLI::PositiveNumber);

  auto* tr = app.add_subcommand("train", "Fit one seed and save a scoring checkpoint");
  tr->add_option("config", config_path, "Run configuration")->required();
  tr->add_option("--seed", seed, "Seed to train (default: first configured seed)");

  std::string model_path, input_path, output_path = "scores.csv", label_column = "class";
  auto* sc = app.add_subcommand("score", "Score CSV rows with a checkpoint");
  sc->add_option("--model", model_path, "Checkpoint written by train")->required();
  sc->add_option("--input", input_path, "Feature CSV with a header row")->required();
  sc->add_option("--output", output_path, "Scores CSV (score,depth)");
  sc->add_option("--label-column", label_column, "Column to ignore if present");

  std::string aggregate_path;
  auto* rep = app.add_subcommand("report", "Print an aggregate CSV as a table");
  rep->add_option("aggregate", aggregate_path, "Aggregate CSV")->required();

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    log << "usage error: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  try {
    if (*gen) {
      return cmd_gen_data(modes, dim, n_per_mode, anomalies, seed, test_fraction,
                          val_fraction, out_prefix, log);
    }
    if (*bench) return cmd_bench(config_path, n_seeds, workers, log);
    if (*sw) return cmd_sweep(config_path, axis, values, n_seeds, workers, log);
    if (*tr) return cmd_train(config_path, seed, tr->count("--seed") > 0, log);
    if (*sc) return cmd_score(model_path, input_path, output_path, label_column, log);
    if (*rep) return cmd_report(aggregate_path, out);
  } catch (const Error& e) {
    log << "error: " << e.what() << std::endl;
    return e.exit_code();
  } catch (const std::filesystem::filesystem_error& e) {
    log << "error: " << e.what() << std::endl;
    return kDataFailure;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << std::endl;
    return kNumericFailure;
  }
  return kUsage;
}

}  // namespace drpo::cli
