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

#include "drpo/config.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "drpo/error.h"

namespace drpo {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"experiment", {"method", "seeds", "workers"}},
      {"data",
       {"source", "modes", "dim", "n_per_mode", "anomaly_n", "path", "label_column",
        "normal_classes", "k_normal", "test_fraction", "val_fraction", "standardize",
        "contamination", "sad_ratio", "sad_classes"}},
      {"projections", {"count", "dim", "components_dropout", "projections_dropout"}},
      {"model", {"hidden", "latent_dim", "leaky_slope", "eps_floor", "ridge", "stats_mode"}},
      {"training",
       {"epochs", "batch_size", "learning_rate", "beta1", "beta2", "epsilon",
        "weight_decay"}},
      {"affine", {"mode", "alpha", "lo", "hi"}},
      {"sweep", {"axis", "values"}},
      {"output", {"results", "aggregate", "checkpoint", "history"}},
  };
  return keys;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  std::optional<std::string> raw(const std::string& key) const {
    if (tree_ == nullptr) return std::nullopt;
    auto it = tree_->find(key);
    if (it == tree_->not_found()) return std::nullopt;
    return trim(it->second.data());
  }

  [[noreturn]] void bad(const std::string& key, const std::string& why) const {
    throw UsageError("config key " + name_ + "." + key + ": " + why);
  }

  void get(const std::string& key, std::string& out) const {
    if (auto v = raw(key)) out = *v;
  }
  void get(const std::string& key, double& out) const {
    if (auto v = raw(key)) {
      try {
        std::size_t used = 0;
        out = std::stod(*v, &used);
        if (used != v->size() || !std::isfinite(out)) bad(key, "not a number");
      } catch (const std::invalid_argument&) {
        bad(key, "not a number");
      } catch (const std::out_of_range&) {
        bad(key, "out of range");
      }
    }
  }
  void get(const std::string& key, int& out) const {
    double v = out;
    get(key, v);
    if (v != std::floor(v) || std::abs(v) > 2e9) bad(key, "not an integer");
    out = static_cast<int>(v);
  }
  void get(const std::string& key, bool& out) const {
    if (auto v = raw(key)) {
      if (*v == "true" || *v == "1" || *v == "yes") out = true;
      else if (*v == "false" || *v == "0" || *v == "no") out = false;
      else bad(key, "not a boolean");
    }
  }
  void get(const std::string& key, std::vector<int>& out) const {
    if (auto v = raw(key)) {
      out.clear();
      for (const std::string& item : split_list(*v)) {
        try {
          std::size_t used = 0;
          const int x = std::stoi(item, &used);
          if (used != item.size()) bad(key, "not an integer list");
          out.push_back(x);
        } catch (const std::logic_error&) {
          bad(key, "not an integer list");
        }
      }
    }
  }
  template <typename Parse, typename T>
  void get_enum(const std::string& key, T& out, Parse parse) const {
    if (auto v = raw(key)) {
      try {
        out = parse(*v);
      } catch (const Error& e) {
        bad(key, e.what());
      }
    }
  }

 private:
  const pt::ptree* tree_;
  std::string name_;
};

void check_parent_dir(const std::string& file, const std::string& key) {
  if (file.empty()) return;
  const std::filesystem::path parent = std::filesystem::path(file).parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent)) {
    throw UsageError("config key " + key + ": directory does not exist: " +
                     parent.string());
  }
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const std::string& item : split_list(text)) {
    const auto dash = item.find('-');
    try {
      if (dash == std::string::npos) {
        std::size_t used = 0;
        seeds.push_back(std::stoull(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } else {
        const std::uint64_t lo = std::stoull(item.substr(0, dash));
        const std::uint64_t hi = std::stoull(item.substr(dash + 1));
        if (hi < lo || hi - lo > 1000000) throw std::invalid_argument(item);
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw UsageError("config key experiment.seeds: bad seed list '" + text + "'");
    }
  }
  if (seeds.empty()) throw UsageError("config key experiment.seeds: empty seed list");
  return seeds;
}

RunConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw UsageError(std::string("config parse error: ") + e.what());
  }
  const auto& keys = known_keys();
  for (const auto& [section, body] : tree) {
    auto it = keys.find(section);
    if (it == keys.end()) {
      throw UsageError(body.empty() ? "config key '" + section + "' outside any section"
                                    : "unknown config section [" + section + "]");
    }
    for (const auto& [key, unused] : body) {
      if (!it->second.count(key)) {
        throw UsageError("unknown config key " + section + "." + key);
      }
    }
  }
  auto section = [&](const std::string& name) {
    auto it = tree.find(name);
    return Section(it == tree.not_found() ? nullptr : &it->second, name);
  };

  RunConfig cfg;
  ExperimentSpec& spec = cfg.spec;

  const Section exp = section("experiment");
  if (auto v = exp.raw("method")) {
    for (const std::string& item : split_list(*v)) {
      try {
        cfg.methods.push_back(parse_method(item));
      } catch (const Error& e) {
        throw UsageError("config key experiment.method: " + std::string(e.what()));
      }
    }
    if (cfg.methods.empty()) throw UsageError("config key experiment.method: empty");
    spec.method = cfg.methods.front();
  } else {
    cfg.methods = {spec.method};
  }
  if (auto seeds = exp.raw("seeds")) {
    try {
      spec.seeds = parse_seed_list(*seeds);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  spec.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  exp.get("workers", spec.workers);

  const Section data = section("data");
  std::string source = "synthetic";
  data.get("source", source);
  if (source == "synthetic") {
    spec.data.kind = DataSource::Kind::kSynthetic;
  } else if (source == "csv") {
    spec.data.kind = DataSource::Kind::kCsv;
  } else {
    data.bad("source", "expected 'synthetic' or 'csv'");
  }
  data.get("modes", spec.data.modes);
  data.get("dim", spec.data.dim);
  data.get("n_per_mode", spec.data.n_per_mode);
  data.get("anomaly_n", spec.data.anomaly_n);
  data.get("path", spec.data.path);
  data.get("label_column", spec.data.label_column);
  data.get("normal_classes", spec.data.normal_classes);
  data.get("k_normal", spec.data.k_normal);
  data.get("test_fraction", spec.data.test_fraction);
  data.get("val_fraction", spec.data.val_fraction);
  data.get("standardize", spec.data.standardize);
  data.get("contamination", spec.contamination);
  data.get("sad_ratio", spec.sad_ratio);
  data.get("sad_classes", spec.sad_classes);

  const Section proj = section("projections");
  proj.get("count", spec.n_projections);
  proj.get("dim", spec.rp_dim);
  proj.get("components_dropout", spec.components_dropout);
  proj.get("projections_dropout", spec.projections_dropout);

  const Section model = section("model");
  model.get("hidden", spec.hidden);
  model.get("latent_dim", spec.latent_dim);
  model.get("leaky_slope", spec.leaky_slope);
  model.get("eps_floor", spec.eps_floor);
  model.get("ridge", spec.ridge);
  model.get_enum("stats_mode", spec.stats_mode, parse_stats_mode);

  const Section training = section("training");
  training.get("epochs", spec.epochs);
  training.get("batch_size", spec.batch_size);
  training.get("learning_rate", spec.adam.learning_rate);
  training.get("beta1", spec.adam.beta1);
  training.get("beta2", spec.adam.beta2);
  training.get("epsilon", spec.adam.epsilon);
  training.get("weight_decay", spec.adam.weight_decay);

  const Section affine = section("affine");
  affine.get_enum("mode", spec.affine.mode, parse_affine_mode);
  affine.get("alpha", spec.affine.alpha);
  affine.get("lo", spec.affine.lo);
  affine.get("hi", spec.affine.hi);

  const Section sw = section("sweep");
  sw.get_enum("axis", cfg.sweep_axis, [](std::string_view v) {
    return std::optional<SweepAxis>(parse_sweep_axis(v));
  });
  if (auto values = sw.raw("values")) cfg.sweep_values = split_list(*values);
  if (cfg.sweep_axis && cfg.sweep_values.empty()) sw.bad("values", "empty value list");

  const Section output = section("output");
  output.get("results", cfg.results_path);
  output.get("aggregate", cfg.aggregate_path);
  output.get("checkpoint", cfg.checkpoint_path);
  output.get("history", cfg.history_path);

  spec.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config: " + path);
  return parse_config(in);
}

void RunConfig::validate_paths() const {
  if (spec.data.kind == DataSource::Kind::kCsv &&
      !std::filesystem::is_regular_file(spec.data.path)) {
    throw DataError("config key data.path: dataset file not found: " + spec.data.path);
  }
  check_parent_dir(results_path, "output.results");
  check_parent_dir(aggregate_path, "output.aggregate");
  check_parent_dir(checkpoint_path, "output.checkpoint");
  check_parent_dir(history_path, "output.history");
}

}  // namespace drpo
