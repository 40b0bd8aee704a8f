/*
 * Copyright 2026 The hfstack Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef HFSTACK_CONFIG_HPP_
#define HFSTACK_CONFIG_HPP_

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hfstack/boosting.hpp"
#include "hfstack/clustering.hpp"
#include "hfstack/decision_tree.hpp"
#include "hfstack/error.hpp"
#include "hfstack/forest.hpp"
#include "hfstack/preprocess.hpp"
#include "hfstack/stacking.hpp"

namespace hfstack {

// paper: SMOTE on the full dataset, then split (reproduces the published
// protocol). sound: split first and oversample the training rows only.
enum class Protocol { kPaper, kSound };

inline std::string to_string(Protocol p) { return p == Protocol::kPaper ? "paper" : "sound"; }

inline Protocol parse_protocol(std::string_view s) {
  if (s == "paper") return Protocol::kPaper;
  if (s == "sound") return Protocol::kSound;
  fail(ErrorKind::kConfig, "protocol must be 'paper' or 'sound', got '" + std::string(s) + "'");
}

enum class ScaleColumns { kAll, kContinuous };

inline const std::vector<std::string>& known_models() {
  static const std::vector<std::string> names{"kmeans", "fcm", "dtree", "forest", "gbt", "stack"};
  return names;
}

// Every field defaults to the published protocol.
struct ExperimentConfig {
  // [run]
  Protocol protocol = Protocol::kPaper;
  std::uint64_t seed = 0;
  std::vector<std::string> models = known_models();
  std::size_t threads = 1;
  // [data]
  std::string data_path = "data/heart_failure_clinical_records_dataset.csv";
  // [split]
  double split_ratio = 0.2;
  bool stratified = false;
  // [smote]
  bool smote_enabled = true;
  std::size_t smote_k = 5;
  double smote_target_ratio = 1.0;
  // [scaler]
  bool scaler_enabled = true;
  ScaleColumns scaler_columns = ScaleColumns::kAll;
  // [kmeans], [fcm]
  KMeansParams kmeans;
  FcmParams fcm;
  // [dtree], [forest], [gbt]
  TreeParams dtree;
  ForestParams forest;
  GbtParams gbt;
  // [stack]
  std::string stack_scheme = "kfold";
  std::size_t stack_k = 5;
  double stack_holdout_fraction = 0.5;
  MetaInput stack_meta_input = MetaInput::kScores;
  ForestParams stack_meta;
  // [output]
  std::string out_dir = "out";

  bool wants(std::string_view model) const {
    return std::find(models.begin(), models.end(), model) != models.end();
  }
};

// Per-stage seeds are derived from the run seed so one number pins a run.
enum class SeedStream : std::uint64_t {
  kSplit = 11,
  kSmote = 12,
  kDtree = 13,
  kForest = 14,
  kStack = 15,
  kKMeans = 16,
  kFcm = 17,
};

inline std::uint64_t stage_seed(const ExperimentConfig& cfg, SeedStream s) {
  return derive_seed(cfg.seed, static_cast<std::uint64_t>(s));
}

inline StackConfig stack_config(const ExperimentConfig& cfg) {
  StackConfig sc;
  sc.base_specs = {cfg.dtree, cfg.forest, cfg.gbt};
  sc.meta_spec = cfg.stack_meta;
  if (cfg.stack_scheme == "kfold") {
    sc.scheme = KFoldScheme{cfg.stack_k};
  } else {
    sc.scheme = HoldoutScheme{cfg.stack_holdout_fraction};
  }
  sc.meta_input = cfg.stack_meta_input;
  sc.seed = stage_seed(cfg, SeedStream::kStack);
  sc.n_threads = cfg.threads;
  return sc;
}

namespace detail {

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string optional_count(const std::optional<std::size_t>& v, const char* unset) {
  return v ? std::to_string(*v) : unset;
}

class ConfigValue {
 public:
  ConfigValue(std::string key, std::string text) : key_(std::move(key)), text_(std::move(text)) {}

  const std::string& text() const { return text_; }

  [[noreturn]] void bad(const std::string& what) const {
    fail(ErrorKind::kConfig, key_ + ": expected " + what + ", got '" + text_ + "'");
  }

  std::uint64_t as_u64() const {
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(text_.data(), text_.data() + text_.size(), v);
    if (ec != std::errc() || p != text_.data() + text_.size() || text_.empty()) bad("a non-negative integer");
    return v;
  }
  std::size_t as_size() const { return static_cast<std::size_t>(as_u64()); }
  std::size_t as_positive() const {
    const auto v = as_size();
    if (v == 0) bad("a positive integer");
    return v;
  }
  double as_real() const {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(text_.data(), text_.data() + text_.size(), v);
    if (ec != std::errc() || p != text_.data() + text_.size() || text_.empty() || !std::isfinite(v)) {
      bad("a real number");
    }
    return v;
  }
  bool as_bool() const {
    if (text_ == "true" || text_ == "on" || text_ == "yes" || text_ == "1") return true;
    if (text_ == "false" || text_ == "off" || text_ == "no" || text_ == "0") return false;
    bad("true or false");
  }
  std::optional<std::size_t> as_optional(std::string_view unset) const {
    if (text_ == unset) return std::nullopt;
    return as_positive();
  }

 private:
  std::string key_;
  std::string text_;
};

inline std::string trim_copy(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim_copy(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline void apply_tree_key(TreeParams& t, const std::string& key, const ConfigValue& v) {
  if (key == "max_depth") {
    t.max_depth = v.as_optional("none");
  } else if (key == "min_samples_split") {
    t.min_samples_split = v.as_size();
  } else if (key == "min_gain") {
    t.min_gain = v.as_real();
  } else if (key == "log_base") {
    t.log_base = v.as_real();
  } else if (key == "feature_subset") {
    t.feature_subset = v.as_optional("auto");
  } else {
    fail(ErrorKind::kConfig, "unknown key '" + key + "'");
  }
}

inline void apply(ExperimentConfig& c, const std::string& section, const std::string& key,
                  const ConfigValue& v) {
  const auto unknown = [&] {
    fail(ErrorKind::kConfig, "unknown key '" + key + "' in section [" + section + "]");
  };
  if (section == "run") {
    if (key == "protocol") c.protocol = parse_protocol(v.text());
    else if (key == "seed") c.seed = v.as_u64();
    else if (key == "threads") c.threads = v.as_positive();
    else if (key == "models") {
      c.models = split_list(v.text());
      for (const auto& m : c.models) {
        const auto& known = known_models();
        if (std::find(known.begin(), known.end(), m) == known.end()) {
          fail(ErrorKind::kConfig, "unknown model '" + m + "'");
        }
      }
    } else unknown();
  } else if (section == "data") {
    if (key == "path") c.data_path = v.text();
    else unknown();
  } else if (section == "split") {
    if (key == "ratio") c.split_ratio = v.as_real();
    else if (key == "stratified") c.stratified = v.as_bool();
    else unknown();
  } else if (section == "smote") {
    if (key == "enabled") c.smote_enabled = v.as_bool();
    else if (key == "k_neighbors") c.smote_k = v.as_positive();
    else if (key == "target_ratio") c.smote_target_ratio = v.as_real();
    else unknown();
  } else if (section == "scaler") {
    if (key == "enabled") c.scaler_enabled = v.as_bool();
    else if (key == "columns") {
      if (v.text() == "all") c.scaler_columns = ScaleColumns::kAll;
      else if (v.text() == "continuous") c.scaler_columns = ScaleColumns::kContinuous;
      else v.bad("'all' or 'continuous'");
    } else unknown();
  } else if (section == "kmeans") {
    if (key == "k") c.kmeans.k = v.as_positive();
    else if (key == "max_iter") c.kmeans.max_iter = v.as_positive();
    else if (key == "tol") c.kmeans.tol = v.as_real();
    else unknown();
  } else if (section == "fcm") {
    if (key == "c") c.fcm.c = v.as_positive();
    else if (key == "m") c.fcm.m = v.as_real();
    else if (key == "max_iter") c.fcm.max_iter = v.as_positive();
    else if (key == "tol") c.fcm.tol = v.as_real();
    else unknown();
  } else if (section == "dtree") {
    if (key == "feature_subset") unknown();
    apply_tree_key(c.dtree, key, v);
  } else if (section == "forest" || section == "stack.meta") {
    auto& f = section == "forest" ? c.forest : c.stack_meta;
    if (key == "n_trees") f.n_trees = v.as_positive();
    else if (key == "bootstrap") f.bootstrap = v.as_bool();
    else apply_tree_key(f.tree, key, v);
  } else if (section == "gbt") {
    if (key == "n_rounds") c.gbt.n_rounds = v.as_positive();
    else if (key == "learning_rate") c.gbt.learning_rate = v.as_real();
    else if (key == "lambda") c.gbt.lambda = v.as_real();
    else if (key == "gamma") c.gbt.gamma = v.as_real();
    else if (key == "max_depth") c.gbt.max_depth = v.as_size();
    else if (key == "base_score") c.gbt.base_score = v.as_real();
    else unknown();
  } else if (section == "stack") {
    if (key == "scheme") {
      if (v.text() != "kfold" && v.text() != "holdout") v.bad("'kfold' or 'holdout'");
      c.stack_scheme = v.text();
    } else if (key == "k") c.stack_k = v.as_size();
    else if (key == "holdout_fraction") c.stack_holdout_fraction = v.as_real();
    else if (key == "meta_input") {
      if (v.text() == "scores") c.stack_meta_input = MetaInput::kScores;
      else if (v.text() == "labels") c.stack_meta_input = MetaInput::kLabels;
      else v.bad("'scores' or 'labels'");
    } else unknown();
  } else if (section == "output") {
    if (key == "dir") c.out_dir = v.text();
    else unknown();
  } else {
    fail(ErrorKind::kConfig, "unknown section [" + section + "]");
  }
}

}  // namespace detail

// Cross-field checks that individual keys cannot express.
inline void validate(const ExperimentConfig& c) {
  if (!(c.split_ratio > 0.0 && c.split_ratio < 1.0)) {
    fail(ErrorKind::kConfig, "split.ratio must lie in (0, 1)");
  }
  if (!(c.smote_target_ratio > 0.0)) fail(ErrorKind::kConfig, "smote.target_ratio must be > 0");
  if (!(c.fcm.m > 1.0)) fail(ErrorKind::kConfig, "fcm.m must exceed 1");
  if (c.stack_scheme == "kfold" && c.stack_k < 2) fail(ErrorKind::kConfig, "stack.k must be >= 2");
  if (!(c.stack_holdout_fraction > 0.0 && c.stack_holdout_fraction < 1.0)) {
    fail(ErrorKind::kConfig, "stack.holdout_fraction must lie in (0, 1)");
  }
  try {
    validate(c.dtree);
    validate(c.forest.tree);
    validate(c.stack_meta.tree);
    validate(c.gbt);
  } catch (const Error& e) {
    fail(ErrorKind::kConfig, e.what());
  }
}

// INI-style text: [section] headers, key = value lines, '#' or ';' comments.
// Unknown sections and keys are rejected.
inline ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {}) {
  std::string line, section = "run";
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find_first_of("#;");
    const std::string body = detail::trim_copy(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') fail(ErrorKind::kConfig, "line " + std::to_string(line_no) + ": bad section header");
      section = detail::trim_copy(std::string_view(body).substr(1, body.size() - 2));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      fail(ErrorKind::kConfig, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = detail::trim_copy(std::string_view(body).substr(0, eq));
    const auto value = detail::trim_copy(std::string_view(body).substr(eq + 1));
    const auto full = section + "." + key;
    if (seen.count(full)) {
      fail(ErrorKind::kConfig, "line " + std::to_string(line_no) + ": duplicate key " + full);
    }
    seen[full] = line_no;
    detail::apply(base, section, key, detail::ConfigValue(full, value));
  }
  validate(base);
  return base;
}

inline ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kConfig, "cannot open config '" + path + "'");
  return parse_config(in);
}

// Canonical rendering of every setting; parse_config(echo) gives back `c`.
inline std::string echo_config(const ExperimentConfig& c) {
  using detail::format_real;
  using detail::optional_count;
  std::ostringstream o;
  const auto tree = [&](const TreeParams& t, bool with_subset) {
    o << "max_depth = " << optional_count(t.max_depth, "none") << '\n'
      << "min_samples_split = " << t.min_samples_split << '\n'
      << "min_gain = " << format_real(t.min_gain) << '\n'
      << "log_base = " << format_real(t.log_base) << '\n';
    if (with_subset) o << "feature_subset = " << optional_count(t.feature_subset, "auto") << '\n';
  };
  std::string models;
  for (const auto& m : c.models) models += (models.empty() ? "" : ",") + m;

  o << "[run]\n"
    << "protocol = " << to_string(c.protocol) << '\n'
    << "seed = " << c.seed << '\n'
    << "models = " << models << '\n'
    << "threads = " << c.threads << '\n'
    << "\n[data]\npath = " << c.data_path << '\n'
    << "\n[split]\nratio = " << format_real(c.split_ratio) << '\n'
    << "stratified = " << (c.stratified ? "true" : "false") << '\n'
    << "\n[smote]\nenabled = " << (c.smote_enabled ? "true" : "false") << '\n'
    << "k_neighbors = " << c.smote_k << '\n'
    << "target_ratio = " << format_real(c.smote_target_ratio) << '\n'
    << "\n[scaler]\nenabled = " << (c.scaler_enabled ? "true" : "false") << '\n'
    << "columns = " << (c.scaler_columns == ScaleColumns::kAll ? "all" : "continuous") << '\n'
    << "\n[kmeans]\nk = " << c.kmeans.k << '\n'
    << "max_iter = " << c.kmeans.max_iter << '\n'
    << "tol = " << format_real(c.kmeans.tol) << '\n'
    << "\n[fcm]\nc = " << c.fcm.c << '\n'
    << "m = " << format_real(c.fcm.m) << '\n'
    << "max_iter = " << c.fcm.max_iter << '\n'
    << "tol = " << format_real(c.fcm.tol) << '\n'
    << "\n[dtree]\n";
  tree(c.dtree, false);
  o << "\n[forest]\nn_trees = " << c.forest.n_trees << '\n'
    << "bootstrap = " << (c.forest.bootstrap ? "true" : "false") << '\n';
  tree(c.forest.tree, true);
  o << "\n[gbt]\nn_rounds = " << c.gbt.n_rounds << '\n'
    << "learning_rate = " << format_real(c.gbt.learning_rate) << '\n'
    << "lambda = " << format_real(c.gbt.lambda) << '\n'
    << "gamma = " << format_real(c.gbt.gamma) << '\n'
    << "max_depth = " << c.gbt.max_depth << '\n'
    << "base_score = " << format_real(c.gbt.base_score) << '\n'
    << "\n[stack]\nscheme = " << c.stack_scheme << '\n'
    << "k = " << c.stack_k << '\n'
    << "holdout_fraction = " << format_real(c.stack_holdout_fraction) << '\n'
    << "meta_input = " << (c.stack_meta_input == MetaInput::kScores ? "scores" : "labels") << '\n'
    << "\n[stack.meta]\nn_trees = " << c.stack_meta.n_trees << '\n'
    << "bootstrap = " << (c.stack_meta.bootstrap ? "true" : "false") << '\n';
  tree(c.stack_meta.tree, true);
  o << "\n[output]\ndir = " << c.out_dir << '\n';
  return o.str();
}

}  // namespace hfstack

#endif  // HFSTACK_CONFIG_HPP_
