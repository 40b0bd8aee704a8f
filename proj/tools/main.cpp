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

// hfstack command-line front end.
//
//   hfstack inspect   [--data PATH]
//   hfstack correlate [--data PATH] [--out DIR]
//   hfstack cluster   [--config PATH] [--seed N] [--protocol paper|sound] [--out DIR]
//   hfstack train     --model NAME [common flags]
//   hfstack evaluate  --model FILE [--data PATH] [--no-clean]
//   hfstack run       [common flags]
//   hfstack report    [common flags]
//
// Exit status: 0 success, 2 config or usage error, 3 data error, 4 runtime error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hfstack/config.hpp"
#include "hfstack/pipeline.hpp"

namespace {

namespace fs = std::filesystem;
using namespace hfstack;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitRuntime = 4;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return kExitConfig;
    case ErrorKind::kMissingColumn:
    case ErrorKind::kNonNumericCell:
    case ErrorKind::kMissingValue:
    case ErrorKind::kEmptyDataset:
    case ErrorKind::kMalformedCsv:
    case ErrorKind::kIo:
    case ErrorKind::kConstantColumn:
    case ErrorKind::kModelFormat:
    case ErrorKind::kDimensionMismatch:
      return kExitData;
    default:
      return kExitRuntime;
  }
}

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string protocol;
  std::string out_dir;
  std::string data_path;
  std::optional<std::size_t> threads;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "Experiment config (INI)");
  cmd->add_option("--seed", f.seed, "Run seed; overrides the config");
  cmd->add_option("--protocol", f.protocol, "paper (SMOTE then split) or sound (split then SMOTE)")
      ->check(CLI::IsMember({"paper", "sound"}));
  cmd->add_option("--out", f.out_dir, "Output directory; overrides the config");
  cmd->add_option("--data", f.data_path, "Dataset CSV; overrides the config");
  cmd->add_option("--threads", f.threads, "Worker threads for forests (0 = all cores)");
}

ExperimentConfig resolve(const CommonFlags& f) {
  ExperimentConfig cfg = f.config_path.empty() ? ExperimentConfig{} : load_config(f.config_path);
  if (f.seed) cfg.seed = *f.seed;
  if (!f.protocol.empty()) cfg.protocol = parse_protocol(f.protocol);
  if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
  if (!f.data_path.empty()) cfg.data_path = f.data_path;
  if (f.threads) cfg.threads = *f.threads;
  validate(cfg);
  return cfg;
}

void print_summary(const ReportBundle& b) {
  std::printf("protocol %s, seed %llu: %zu train rows, %zu test rows\n", to_string(b.config.protocol).c_str(),
              static_cast<unsigned long long>(b.config.seed), b.train_rows, b.test_rows);
  for (const auto& m : b.models) {
    std::printf("  %-8s accuracy %s  f1 %s  auc %s\n", m.name.c_str(), percent(m.metrics.accuracy).c_str(),
                fixed(m.metrics.f1).c_str(), m.auc ? fixed(*m.auc).c_str() : "n/a");
  }
  for (const auto& c : b.clusters) {
    std::printf("  %-8s cluster accuracy %s (%zu iterations)\n", c.name.c_str(), percent(c.accuracy).c_str(),
                c.iterations);
  }
}

ReportBundle run_and_write(const ExperimentConfig& cfg, const fs::path& dir) {
  OutputLock lock(dir);
  ReportBundle b = run_pipeline(cfg);
  write_bundle(b, dir);
  return b;
}

int cmd_inspect(const CommonFlags& f) {
  const ExperimentConfig cfg = resolve(f);
  const Dataset ds = load_clean(cfg.data_path);
  const auto counts = class_counts(ds);
  const auto get = [&](Label l) { return counts.count(l) ? counts.at(l) : std::size_t{0}; };
  std::printf("%zu rows, %zu features, classes %zu/%zu\n", ds.size(), ds.num_features(), get(0), get(1));
  for (const auto& col : ds.schema.columns) {
    std::printf("  %-26s %-10s %s\n", col.name.c_str(),
                col.kind == ColumnKind::kBinary ? "binary" : "continuous", col.unit.c_str());
  }
  std::printf("  %-26s target (0 = survived, 1 = passed away)\n", ds.schema.target_name.c_str());
  return kExitOk;
}

int cmd_correlate(const CommonFlags& f) {
  const ExperimentConfig cfg = resolve(f);
  const Dataset ds = load_clean(cfg.data_path);
  const CorrelationMatrix cm = pearson_matrix(ds);
  const fs::path dir = cfg.out_dir;
  OutputLock lock(dir);
  std::ostringstream o;
  write_correlation_csv(o, cm);
  write_text(dir / "correlation.csv", o.str());

  const std::size_t target = cm.labels.size() - 1;
  std::vector<std::size_t> order(target);
  for (std::size_t i = 0; i < target; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(cm.values(a, target)) > std::abs(cm.values(b, target));
  });
  std::printf("correlation with %s (by |r|):\n", cm.labels[target].c_str());
  for (auto i : order) std::printf("  %-26s %+.6f\n", cm.labels[i].c_str(), cm.values(i, target));
  std::printf("wrote %s\n", (dir / "correlation.csv").string().c_str());
  return kExitOk;
}

int cmd_models(const CommonFlags& f, std::vector<std::string> models) {
  ExperimentConfig cfg = resolve(f);
  if (!models.empty()) cfg.models = std::move(models);
  validate(cfg);
  const ReportBundle b = run_and_write(cfg, cfg.out_dir);
  print_summary(b);
  std::printf("wrote %s\n", cfg.out_dir.c_str());
  return kExitOk;
}

int cmd_evaluate(const CommonFlags& f, const std::string& model_path, bool no_clean) {
  const ExperimentConfig cfg = resolve(f);
  const ModelFile file = load_model_file(model_path);
  Dataset ds = load_csv(cfg.data_path, heart_failure_schema());
  if (!no_clean) ds = clean(ds);
  const Matrix x = file.scaler ? apply_scaler(ds.rows, *file.scaler) : ds.rows;
  const ModelReport r = evaluate(file.name, x, ds.labels,
                                 [&](std::span<const double> row) { return predict(file.model, row); });
  nlohmann::ordered_json j;
  j["model"] = r.name;
  j["rows"] = ds.size();
  j["accuracy"] = r.metrics.accuracy;
  j["precision"] = r.metrics.precision;
  j["recall"] = r.metrics.recall;
  j["f1"] = r.metrics.f1;
  j["auc"] = r.auc ? nlohmann::ordered_json(*r.auc) : nlohmann::ordered_json(nullptr);
  j["macro_precision"] = r.macro.precision;
  j["macro_recall"] = r.macro.recall;
  j["macro_f1"] = r.macro.f1;
  j["tp"] = r.cm.tp;
  j["fp"] = r.cm.fp;
  j["fn"] = r.cm.fn;
  j["tn"] = r.cm.tn;
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_report(const CommonFlags& f) {
  const ExperimentConfig cfg = resolve(f);
  const fs::path dir = cfg.out_dir;
  OutputLock lock(dir);
  ExperimentConfig paper_cfg = cfg, sound_cfg = cfg;
  paper_cfg.protocol = Protocol::kPaper;
  sound_cfg.protocol = Protocol::kSound;
  const ReportBundle paper = run_pipeline(paper_cfg);
  const ReportBundle sound = run_pipeline(sound_cfg);
  write_bundle(paper, dir / "paper");
  write_bundle(sound, dir / "sound");
  const std::string comparison = comparison_table(paper, sound);
  write_text(dir / "comparison.md", comparison);
  std::cout << report_table(cfg.protocol == Protocol::kPaper ? paper : sound) << '\n' << comparison;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hfstack: heart-failure survival prediction experiments"};
  app.require_subcommand(1);
  CommonFlags flags;
  std::string model_name, model_file;
  bool no_clean = false;

  auto* inspect = app.add_subcommand("inspect", "Print schema and class counts of the dataset");
  auto* correlate = app.add_subcommand("correlate", "Write the Pearson correlation matrix");
  auto* cluster = app.add_subcommand("cluster", "Run the K-Means and Fuzzy C-Means baselines");
  auto* train = app.add_subcommand("train", "Fit, evaluate and save one model");
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a saved model on a data file");
  auto* run = app.add_subcommand("run", "Run every configured model and write all artifacts");
  auto* report = app.add_subcommand("report", "Run both protocols and render comparison tables");
  for (auto* cmd : {inspect, correlate, cluster, train, evaluate_cmd, run, report}) add_common(cmd, flags);
  train->add_option("--model", model_name, "Model to fit")
      ->required()
      ->check(CLI::IsMember({"dtree", "forest", "gbt", "stack"}));
  evaluate_cmd->add_option("--model", model_file, "Saved model file")->required();
  evaluate_cmd->add_flag("--no-clean", no_clean, "Score the rows as stored, without rounding");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*inspect) return cmd_inspect(flags);
    if (*correlate) return cmd_correlate(flags);
    if (*cluster) return cmd_models(flags, {"kmeans", "fcm"});
    if (*train) return cmd_models(flags, {model_name});
    if (*evaluate_cmd) return cmd_evaluate(flags, model_file, no_clean);
    if (*run) return cmd_models(flags, {});
    if (*report) return cmd_report(flags);
  } catch (const Error& e) {
    std::fprintf(stderr, "hfstack: %s\n", e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "hfstack: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitConfig;
}
