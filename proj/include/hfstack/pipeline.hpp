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

#ifndef HFSTACK_PIPELINE_HPP_
#define HFSTACK_PIPELINE_HPP_

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "hfstack/clustering.hpp"
#include "hfstack/config.hpp"
#include "hfstack/dataset.hpp"
#include "hfstack/metrics.hpp"
#include "hfstack/preprocess.hpp"
#include "hfstack/serialize.hpp"
#include "hfstack/stacking.hpp"

namespace hfstack {

struct ModelReport {
  std::string name;
  ConfusionMatrix cm;
  MetricsReport metrics;  // positive class (1 = passed away)
  MetricsReport macro;
  std::optional<RocCurve> roc;  // absent when the test rows hold one class
  std::optional<double> auc;
};

struct ClusterReport {
  std::string name;
  double accuracy = 0.0;
  std::size_t iterations = 0;
  std::vector<std::size_t> assignments;
  Labels truth;
  std::optional<Matrix> memberships;  // fuzzy models only
};

struct ClassCountTrace {
  std::map<Label, std::size_t> original;   // after cleaning
  std::map<Label, std::size_t> resampled;  // the set SMOTE produced (or its input when disabled)
  std::map<Label, std::size_t> train;
  std::map<Label, std::size_t> test;
};

struct FittedModel {
  std::string name;
  SavedModel model;
};

struct ReportBundle {
  ExperimentConfig config;
  std::map<std::string, std::uint64_t> seeds;
  CorrelationMatrix correlation;
  ClassCountTrace counts;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::optional<ScalerParams> scaler;
  std::vector<ModelReport> models;
  std::vector<ClusterReport> clusters;
  std::vector<FittedModel> fitted;

  const ModelReport* find_model(const std::string& name) const {
    for (const auto& m : models) {
      if (m.name == name) return &m;
    }
    return nullptr;
  }
  const ClusterReport* find_cluster(const std::string& name) const {
    for (const auto& c : clusters) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
};

inline std::string display_name(const std::string& model) {
  static const std::map<std::string, std::string> names{
      {"dtree", "Decision tree"},
      {"forest", "Random forest"},
      {"gbt", "Gradient boosting (XGB-style)"},
      {"stack", "Stacked ensemble"},
      {"kmeans", "K-Means"},
      {"fcm", "Fuzzy C-Means"},
  };
  const auto it = names.find(model);
  return it == names.end() ? model : it->second;
}

inline std::vector<std::size_t> scaler_columns(const FeatureSchema& schema, ScaleColumns which) {
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (which == ScaleColumns::kAll || schema.columns[c].kind == ColumnKind::kContinuous) {
      cols.push_back(c);
    }
  }
  return cols;
}

// Scores every row of `x` and summarizes against `y`.
template <class Predictor>
ModelReport evaluate(const std::string& name, const Matrix& x, const Labels& y, Predictor&& predictor) {
  Labels predicted(x.rows());
  std::vector<double> scores(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const Prediction p = predictor(x.row(r));
    predicted[r] = p.label;
    scores[r] = p.score;
  }
  ModelReport report;
  report.name = name;
  report.cm = confusion(y, predicted);
  report.metrics = classification_metrics(report.cm);
  report.macro = macro_metrics(report.cm);
  if (report.cm.tp + report.cm.fn > 0 && report.cm.fp + report.cm.tn > 0) {
    report.roc = roc_curve(y, scores);
    report.auc = auc(*report.roc);
  }
  return report;
}

inline Dataset load_clean(const std::string& path) {
  return clean(load_csv(path, heart_failure_schema()));
}

/// Runs load, clean, resample/split (order set by the protocol), scale, fit and
/// evaluate for every model the config asks for. Writes nothing to disk.
inline ReportBundle run_pipeline(const ExperimentConfig& cfg) {
  validate(cfg);
  ReportBundle bundle;
  bundle.config = cfg;
  const auto seed_of = [&](const char* name, SeedStream s) {
    const auto v = stage_seed(cfg, s);
    bundle.seeds[name] = v;
    return v;
  };
  const std::uint64_t split_seed = seed_of("split", SeedStream::kSplit);
  const std::uint64_t smote_seed = seed_of("smote", SeedStream::kSmote);

  const Dataset data = load_clean(cfg.data_path);
  bundle.correlation = pearson_matrix(data);
  bundle.counts.original = class_counts(data);

  const auto oversample = [&](const Dataset& ds) {
    if (!cfg.smote_enabled) return ds;
    SmoteConfig sc;
    sc.k_neighbors = cfg.smote_k;
    sc.seed = smote_seed;
    sc.target_ratio = cfg.smote_target_ratio;
    return smote(ds, sc);
  };

  Dataset train, test, cluster_data;
  if (cfg.protocol == Protocol::kPaper) {
    Dataset resampled = oversample(data);
    bundle.counts.resampled = class_counts(resampled);
    SplitResult split = train_test_split(resampled, cfg.split_ratio, split_seed, cfg.stratified);
    train = std::move(split.train);
    test = std::move(split.test);
    cluster_data = std::move(resampled);
  } else {
    SplitResult split = train_test_split(data, cfg.split_ratio, split_seed, cfg.stratified);
    train = oversample(split.train);
    bundle.counts.resampled = class_counts(train);
    test = std::move(split.test);
    cluster_data = data;
  }
  bundle.counts.train = class_counts(train);
  bundle.counts.test = class_counts(test);
  bundle.train_rows = train.size();
  bundle.test_rows = test.size();

  const auto columns = scaler_columns(data.schema, cfg.scaler_columns);
  if (cfg.scaler_enabled) {
    bundle.scaler = fit_scaler(train, columns);
    train = apply_scaler(train, *bundle.scaler);
    test = apply_scaler(test, *bundle.scaler);
  }

  if (cfg.wants("kmeans") || cfg.wants("fcm")) {
    Matrix points = cluster_data.rows;
    if (cfg.scaler_enabled) points = apply_scaler(points, fit_scaler(cluster_data, columns));
    if (cfg.wants("kmeans")) {
      KMeansParams kp = cfg.kmeans;
      kp.seed = seed_of("kmeans", SeedStream::kKMeans);
      const KMeansModel km = kmeans_fit(points, kp);
      bundle.clusters.push_back({"kmeans", cluster_accuracy(km.labels, cluster_data.labels),
                                 km.iterations, km.labels, cluster_data.labels, std::nullopt});
    }
    if (cfg.wants("fcm")) {
      FcmParams fp = cfg.fcm;
      fp.seed = seed_of("fcm", SeedStream::kFcm);
      const FcmModel fm = fcm_fit(points, fp);
      const auto hard = harden(fm.memberships);
      bundle.clusters.push_back({"fcm", cluster_accuracy(hard, cluster_data.labels), fm.iterations,
                                 hard, cluster_data.labels, fm.memberships});
    }
  }

  const auto record = [&](const std::string& name, SavedModel model) {
    bundle.models.push_back(evaluate(name, test.rows, test.labels,
                                     [&](std::span<const double> x) { return predict(model, x); }));
    bundle.fitted.push_back({name, std::move(model)});
  };
  if (cfg.wants("dtree")) {
    Prng prng(seed_of("dtree", SeedStream::kDtree));
    record("dtree", fit_tree(train.rows, train.labels, cfg.dtree, prng));
  }
  if (cfg.wants("forest")) {
    ForestParams fp = cfg.forest;
    fp.seed = seed_of("forest", SeedStream::kForest);
    fp.n_threads = cfg.threads;
    record("forest", fit_forest(train.rows, train.labels, fp));
  }
  if (cfg.wants("gbt")) record("gbt", fit_gbt(train.rows, train.labels, cfg.gbt));
  if (cfg.wants("stack")) {
    const StackConfig sc = stack_config(cfg);
    bundle.seeds["stack"] = sc.seed;
    record("stack", fit_stack(train.rows, train.labels, sc));
  }
  return bundle;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

inline const ModelReport* headline_model(const ReportBundle& b) {
  if (const auto* s = b.find_model("stack")) return s;
  return b.models.empty() ? nullptr : &b.models.back();
}

/// Flat key-value JSON. Unprefixed keys describe the headline model (the stack
/// when it ran); every model also appears under "<model>.<metric>".
inline nlohmann::ordered_json metrics_json(const ReportBundle& b) {
  nlohmann::ordered_json j;
  j["protocol"] = to_string(b.config.protocol);
  j["seed"] = b.config.seed;
  const auto put = [&](const std::string& prefix, const ModelReport& m) {
    j[prefix + "accuracy"] = m.metrics.accuracy;
    j[prefix + "precision"] = m.metrics.precision;
    j[prefix + "recall"] = m.metrics.recall;
    j[prefix + "f1"] = m.metrics.f1;
    j[prefix + "auc"] = m.auc ? nlohmann::ordered_json(*m.auc) : nlohmann::ordered_json(nullptr);
    j[prefix + "tp"] = m.cm.tp;
    j[prefix + "fp"] = m.cm.fp;
    j[prefix + "fn"] = m.cm.fn;
    j[prefix + "tn"] = m.cm.tn;
    j[prefix + "macro_precision"] = m.macro.precision;
    j[prefix + "macro_recall"] = m.macro.recall;
    j[prefix + "macro_f1"] = m.macro.f1;
    j[prefix + "support"] = m.metrics.support;
  };
  if (const auto* h = headline_model(b)) {
    j["model"] = h->name;
    put("", *h);
  }
  j["train_rows"] = b.train_rows;
  j["test_rows"] = b.test_rows;
  for (const auto& m : b.models) put(m.name + ".", m);
  for (const auto& c : b.clusters) {
    j[c.name + ".cluster_accuracy"] = c.accuracy;
    j[c.name + ".iterations"] = c.iterations;
  }
  for (const auto& [name, v] : b.seeds) j["seed." + name] = v;
  return j;
}

inline std::string counts_text(const ReportBundle& b) {
  std::ostringstream o;
  const auto line = [&](const char* label, const std::map<Label, std::size_t>& c) {
    const auto get = [&](Label l) { return c.count(l) ? c.at(l) : std::size_t{0}; };
    o << label << " survived=" << get(0) << " passed_away=" << get(1) << '\n';
  };
  o << "protocol " << to_string(b.config.protocol) << '\n';
  line("original", b.counts.original);
  line("resampled", b.counts.resampled);
  line("train", b.counts.train);
  line("test", b.counts.test);
  return o.str();
}

inline std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
  return buf;
}

inline std::string fixed(double v, int digits = 4) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

/// Published results of earlier studies, shown beside ours for context.
struct PriorWork {
  std::string study;
  int features;
  std::string algorithms;
  std::string accuracy, precision, recall, f1;
};

inline const std::vector<PriorWork>& prior_work() {
  static const std::vector<PriorWork> rows{
      {"Chicco & Jurman (2020)", 2, "RF, LR, DT, SVM, KNN", "83.30%", "N/A", "N/A", "71.40%"},
      {"Patel et al. (2016)", 13, "J48, Logistic Model Tree, RF", "83.40%", "N/A", "N/A", "N/A"},
      {"Erdas & Olcer (2020)", 13, "1Rule, RF, SVM, Multi-Layer Perceptron, NB", "86%", "94%", "86%", "90%"},
      {"Ishaq et al. (2021)", 9, "DT, ADB, LR, RF, Extra Trees Classifier, SVM", "92.62%", "93%", "93%", "93%"},
      {"Alotaibi (2019)", 13, "DT, NB, RF, LR, SVM", "93.19%", "N/A", "N/A", "N/A"},
  };
  return rows;
}

inline std::string report_table(const ReportBundle& b) {
  std::ostringstream o;
  o << "# Results (" << to_string(b.config.protocol) << " protocol, seed " << b.config.seed << ")\n\n"
    << "Train rows: " << b.train_rows << ", test rows: " << b.test_rows << "\n\n"
    << "| Model | Accuracy | Precision | Recall | F1 | Macro F1 | AUC |\n"
    << "|---|---|---|---|---|---|---|\n";
  for (const auto& m : b.models) {
    o << "| " << display_name(m.name) << " | " << percent(m.metrics.accuracy) << " | "
      << fixed(m.metrics.precision) << " | " << fixed(m.metrics.recall) << " | " << fixed(m.metrics.f1)
      << " | " << fixed(m.macro.f1) << " | " << (m.auc ? fixed(*m.auc) : "n/a") << " |\n";
  }
  for (const auto& c : b.clusters) {
    o << "| " << display_name(c.name) << " | " << percent(c.accuracy) << " | | | | | |\n";
  }
  o << "\n## Prior work (published figures)\n\n"
    << "| Study | Features | Algorithms | Accuracy | Precision | Recall | F1 |\n"
    << "|---|---|---|---|---|---|---|\n";
  for (const auto& p : prior_work()) {
    o << "| " << p.study << " | " << p.features << " | " << p.algorithms << " | " << p.accuracy << " | "
      << p.precision << " | " << p.recall << " | " << p.f1 << " |\n";
  }
  return o.str();
}

/// Side-by-side table for a paper-protocol and a sound-protocol run.
inline std::string comparison_table(const ReportBundle& paper, const ReportBundle& sound) {
  std::ostringstream o;
  o << "# Protocol comparison (seed " << paper.config.seed << ")\n\n"
    << "paper: SMOTE on all rows, then split (" << paper.train_rows << " train / " << paper.test_rows
    << " test).\n"
    << "sound: split first, SMOTE on training rows only (" << sound.train_rows << " train / "
    << sound.test_rows << " test).\n\n"
    << "| Model | Accuracy (paper) | Accuracy (sound) | F1 (paper) | F1 (sound) | AUC (paper) | AUC (sound) |\n"
    << "|---|---|---|---|---|---|---|\n";
  const auto opt = [](const std::optional<double>& v) { return v ? fixed(*v) : std::string("n/a"); };
  for (const auto& p : paper.models) {
    const auto* s = sound.find_model(p.name);
    o << "| " << display_name(p.name) << " | " << percent(p.metrics.accuracy) << " | "
      << (s ? percent(s->metrics.accuracy) : "n/a") << " | " << fixed(p.metrics.f1) << " | "
      << (s ? fixed(s->metrics.f1) : "n/a") << " | " << opt(p.auc) << " | "
      << (s ? opt(s->auc) : "n/a") << " |\n";
  }
  for (const auto& p : paper.clusters) {
    const auto* s = sound.find_cluster(p.name);
    o << "| " << display_name(p.name) << " | " << percent(p.accuracy) << " | "
      << (s ? percent(s->accuracy) : "n/a") << " | | | | |\n";
  }
  return o.str();
}

// ---------------------------------------------------------------------------
// Artifacts
// ---------------------------------------------------------------------------

/// Fail-fast guard against two runs writing the same output directory.
class OutputLock {
 public:
  explicit OutputLock(const std::filesystem::path& dir) : path_(dir / ".hfstack.lock") {
    std::filesystem::create_directories(dir);
    std::FILE* f = std::fopen(path_.c_str(), "wx");
    if (f == nullptr) {
      fail(ErrorKind::kIo, "output directory " + dir.string() + " is locked by another run (remove " +
                               path_.string() + " if stale)");
    }
    std::fclose(f);
  }
  ~OutputLock() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorKind::kIo, "failed writing " + path.string());
}

inline void write_cluster_csv(std::ostream& out, const ClusterReport& c) {
  out << "row,cluster,label";
  if (c.memberships) {
    for (std::size_t j = 0; j < c.memberships->cols(); ++j) out << ",membership_" << j;
  }
  out << '\n';
  char buf[40];
  for (std::size_t i = 0; i < c.assignments.size(); ++i) {
    out << i << ',' << c.assignments[i] << ',' << c.truth[i];
    if (c.memberships) {
      for (std::size_t j = 0; j < c.memberships->cols(); ++j) {
        std::snprintf(buf, sizeof buf, ",%.10g", (*c.memberships)(i, j));
        out << buf;
      }
    }
    out << '\n';
  }
}

/// Writes metrics.json, counts.txt, config_echo.txt, correlation.csv,
/// report.md, roc_<model>.csv, clusters_<model>.csv and models/<name>.model.
inline void write_bundle(const ReportBundle& b, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_text(dir / "metrics.json", metrics_json(b).dump(2) + "\n");
  write_text(dir / "counts.txt", counts_text(b));
  write_text(dir / "config_echo.txt", echo_config(b.config));
  write_text(dir / "report.md", report_table(b));
  {
    std::ostringstream o;
    write_correlation_csv(o, b.correlation);
    write_text(dir / "correlation.csv", o.str());
  }
  for (const auto& m : b.models) {
    if (!m.roc) continue;
    std::ostringstream o;
    write_roc_csv(o, *m.roc);
    write_text(dir / ("roc_" + m.name + ".csv"), o.str());
  }
  for (const auto& c : b.clusters) {
    std::ostringstream o;
    write_cluster_csv(o, c);
    write_text(dir / ("clusters_" + c.name + ".csv"), o.str());
  }
  if (!b.fitted.empty()) fs::create_directories(dir / "models");
  for (const auto& f : b.fitted) {
    save_model_file((dir / "models" / (f.name + ".model")).string(), ModelFile{f.name, b.scaler, f.model});
  }
}

}  // namespace hfstack

#endif  // HFSTACK_PIPELINE_HPP_
