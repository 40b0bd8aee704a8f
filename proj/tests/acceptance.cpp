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

// Acceptance harness. Prints one PASS/FAIL line per acceptance criterion,
// followed by indented detail lines, and exits nonzero if any criterion fails.
//
//   hfstack_acceptance --data CSV --cli PATH --work DIR

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hfstack/pipeline.hpp"
#include "test_support.hpp"

namespace {

namespace fs = std::filesystem;
using namespace hfstack;
using Clock = std::chrono::steady_clock;

constexpr double kPublishedAccuracy = 0.9998;
constexpr std::uint64_t kSeeds = 10;

struct Outcome {
  bool pass = false;
  std::vector<std::string> details;

  void note(const std::string& line) { details.push_back(line); }
  Outcome& fail(const std::string& line) {
    pass = false;
    note(line);
    return *this;
  }
};

__attribute__((format(printf, 1, 2))) std::string format(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::size_t count_of(const std::map<Label, std::size_t>& c, Label l) {
  return c.count(l) ? c.at(l) : 0;
}

// ---------------------------------------------------------------------------
// Criteria 1-5: canonical dataset
// ---------------------------------------------------------------------------

Outcome dataset_fidelity(const std::string& path) {
  Outcome o;
  const auto start = Clock::now();
  const Dataset ds = load_clean(path);
  const auto before = class_counts(ds);
  const Dataset resampled = smote(ds, SmoteConfig{5, 0, 1.0});
  const auto after = class_counts(resampled);
  const double elapsed = seconds_since(start);
  o.note(format("cleaned: %zu rows, survived=%zu passed_away=%zu (expected 299, 203/96)", ds.size(),
                count_of(before, 0), count_of(before, 1)));
  o.note(format("after SMOTE: %zu rows, survived=%zu passed_away=%zu (expected 406, 203/203)",
                resampled.size(), count_of(after, 0), count_of(after, 1)));
  o.note(format("runtime %.3f s (limit 1 s)", elapsed));
  o.pass = ds.size() == 299 && count_of(before, 0) == 203 && count_of(before, 1) == 96 &&
           resampled.size() == 406 && count_of(after, 0) == 203 && count_of(after, 1) == 203 &&
           elapsed < 1.0;
  return o;
}

Outcome correlation_ranking(const std::string& path) {
  Outcome o;
  const auto start = Clock::now();
  const CorrelationMatrix cm = pearson_matrix(load_clean(path));
  const double elapsed = seconds_since(start);
  const std::size_t target = cm.labels.size() - 1;
  std::vector<std::size_t> order(target);
  for (std::size_t i = 0; i < target; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(cm.values(a, target)) > std::abs(cm.values(b, target));
  });
  std::string ranking;
  for (std::size_t i = 0; i < 5; ++i) {
    ranking += format("%s%s=%+.4f", i ? ", " : "", cm.labels[order[i]].c_str(), cm.values(order[i], target));
  }
  o.note("top five by |r| with DEATH_EVENT: " + ranking);
  o.note(format("runtime %.3f s (limit 1 s)", elapsed));
  const std::set<std::string> next{cm.labels[order[1]], cm.labels[order[2]], cm.labels[order[3]],
                                   cm.labels[order[4]]};
  const std::set<std::string> expected{"ejection_fraction", "serum_creatinine", "age", "serum_sodium"};
  o.pass = cm.labels[order[0]] == "time" && next == expected && elapsed < 1.0;
  return o;
}

struct SeedRun {
  double stack_acc, forest_acc, gbt_acc, stack_auc, forest_auc;
};

std::vector<SeedRun> supervised_runs(const std::string& path, double& elapsed) {
  std::vector<SeedRun> runs;
  const auto start = Clock::now();
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    ExperimentConfig cfg;
    cfg.protocol = Protocol::kPaper;
    cfg.seed = seed;
    cfg.data_path = path;
    cfg.models = {"forest", "gbt", "stack"};
    const ReportBundle b = run_pipeline(cfg);
    const auto* s = b.find_model("stack");
    const auto* f = b.find_model("forest");
    const auto* g = b.find_model("gbt");
    runs.push_back({s->metrics.accuracy, f->metrics.accuracy, g->metrics.accuracy, s->auc.value_or(NAN),
                    f->auc.value_or(NAN)});
  }
  elapsed = seconds_since(start);
  return runs;
}

double mean_of(const std::vector<SeedRun>& runs, double SeedRun::*field) {
  double sum = 0.0;
  for (const auto& r : runs) sum += r.*field;
  return sum / static_cast<double>(runs.size());
}

Outcome supervised_accuracy(const std::vector<SeedRun>& runs, double elapsed) {
  Outcome o;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    o.note(format("seed %zu: stack %.4f  forest %.4f  gbt %.4f", i, runs[i].stack_acc, runs[i].forest_acc,
                  runs[i].gbt_acc));
  }
  const double stack = mean_of(runs, &SeedRun::stack_acc);
  const double forest = mean_of(runs, &SeedRun::forest_acc);
  const double gbt = mean_of(runs, &SeedRun::gbt_acc);
  o.note(format("mean stack accuracy %.4f (threshold 0.93); published 0.9998, gap %+.4f", stack,
                stack - kPublishedAccuracy));
  o.note(format("mean forest accuracy %.4f, mean gbt accuracy %.4f (threshold 0.88 each)", forest, gbt));
  o.note(format("runtime %.2f s for %llu seeds (limit 60 s)", elapsed, static_cast<unsigned long long>(kSeeds)));
  o.pass = stack >= 0.93 && forest >= 0.88 && gbt >= 0.88 && elapsed < 60.0;
  return o;
}

Outcome supervised_auc(const std::vector<SeedRun>& runs) {
  Outcome o;
  const double stack = mean_of(runs, &SeedRun::stack_auc);
  const double forest = mean_of(runs, &SeedRun::forest_auc);
  o.note(format("mean stack AUC %.4f (threshold 0.95; published 0.99)", stack));
  o.note(format("mean forest AUC %.4f (threshold 0.93; published 0.968)", forest));
  o.pass = stack >= 0.95 && forest >= 0.93;
  return o;
}

Outcome clustering_bands(const std::string& path) {
  Outcome o;
  std::size_t kmeans_in = 0, fcm_in = 0;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    ExperimentConfig cfg;
    cfg.seed = seed;
    cfg.data_path = path;
    cfg.models = {"kmeans", "fcm"};
    const ReportBundle b = run_pipeline(cfg);
    const double km = b.find_cluster("kmeans")->accuracy, fc = b.find_cluster("fcm")->accuracy;
    kmeans_in += km >= 0.52 && km <= 0.72;
    fcm_in += fc >= 0.48 && fc <= 0.65;
    o.note(format("seed %llu: kmeans %.4f  fcm %.4f", static_cast<unsigned long long>(seed), km, fc));
  }
  o.note(format("kmeans in [0.52, 0.72] for %zu/10 seeds; fcm in [0.48, 0.65] for %zu/10 seeds (need 8)",
                kmeans_in, fcm_in));
  o.pass = kmeans_in >= 8 && fcm_in >= 8;
  return o;
}

// ---------------------------------------------------------------------------
// Criteria 6 and 8: CLI runs
// ---------------------------------------------------------------------------

int run_command(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

std::set<std::string> listing(const fs::path& dir) {
  std::set<std::string> names;
  if (!fs::exists(dir)) return names;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) names.insert(fs::relative(e.path(), dir).string());
  }
  return names;
}

Outcome sound_protocol_report(const std::string& cli, const fs::path& data, const fs::path& work) {
  Outcome o;
  const fs::path out = work / "report";
  fs::remove_all(out);
  const int code = run_command(quote(cli) + " report --protocol sound --seed 0 --data " + quote(data) +
                               " --out " + quote(out));
  o.note(format("`hfstack report --protocol sound` exit status %d", code));
  const auto paper = listing(out / "paper"), sound = listing(out / "sound");
  o.note(format("paper artifacts %zu, sound artifacts %zu", paper.size(), sound.size()));
  bool required = true;
  for (const char* f : {"metrics.json", "counts.txt", "config_echo.txt", "correlation.csv", "roc_stack.csv",
                        "roc_forest.csv", "models/stack.model"}) {
    if (!sound.count(f)) {
      o.note(std::string("missing sound artifact ") + f);
      required = false;
    }
  }
  const bool table = fs::exists(out / "comparison.md") &&
                     testing::read_file(out / "comparison.md").find("| Stacked ensemble |") != std::string::npos;
  o.note(table ? "comparison.md written with a row per model" : "comparison.md missing or incomplete");
  o.pass = code == 0 && paper == sound && required && table;
  return o;
}

Outcome determinism(const std::string& cli, const fs::path& data, const fs::path& work) {
  Outcome o;
  o.pass = true;
  std::string first;
  for (int i = 0; i < 2; ++i) {
    const fs::path out = work / ("run" + std::to_string(i));
    fs::remove_all(out);
    const int code = run_command(quote(cli) + " run --seed 3 --data " + quote(data) + " --out " + quote(out) +
                                 (i ? " --threads 3" : ""));
    if (code != 0) return o.fail(format("`hfstack run` exit status %d", code));
    const std::string metrics = testing::read_file(out / "metrics.json");
    if (metrics.empty()) return o.fail("metrics.json missing");
    if (i == 0) first = metrics;
    else if (metrics != first) o.fail("metrics.json differs between runs");
  }
  o.note(format("two CLI runs (threads 1 and 3): metrics.json %s (%zu bytes)",
                o.pass ? "byte-identical" : "differs", first.size()));

  const Dataset ds = load_clean(data.string());
  ForestParams fp;
  fp.n_trees = 60;
  fp.seed = 17;
  const ForestModel reference = fit_forest(ds.rows, ds.labels, fp);
  for (std::size_t threads : {2, 4, 8}) {
    fp.n_threads = threads;
    if (!(fit_forest(ds.rows, ds.labels, fp) == reference)) {
      o.fail(format("forest with %zu threads differs from the single-threaded forest", threads));
    }
  }
  if (o.pass) o.note("forest models identical for 1, 2, 4 and 8 worker threads");
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 7: oracle equivalence
// ---------------------------------------------------------------------------

struct OracleCheck {
  const char* name;
  std::function<std::string()> run;  // empty string means pass
};

std::string auc_oracle() {
  Prng prng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + prng.below(49);
    Labels y(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<Label>(prng.below(2));
      s[i] = static_cast<double>(prng.below(8)) / 8.0;
    }
    y[0] = 0;
    y[1] = 1;
    double wins = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (y[i] != 1 || y[j] != 0) continue;
        pairs += 1.0;
        wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
      }
    }
    worst = std::max(worst, std::abs(auc(roc_curve(y, s)) - wins / pairs));
  }
  return worst < 1e-9 ? "" : format("max |AUC - pairwise| = %.3g", worst);
}

std::string split_oracle() {
  Prng prng(404);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + prng.below(19), d = 1 + prng.below(3);
    const Matrix x = testing::random_grid_matrix(prng, n, d, 6);
    Labels y = testing::random_labels(prng, n);
    y[0] = 0;
    y[1] = 1;
    // Every (feature, midpoint) with both sides non-empty.
    double best = -1.0;
    std::size_t best_f = 0;
    double best_t = 0.0;
    for (std::size_t f = 0; f < d; ++f) {
      std::vector<double> values = x.column(f);
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
      for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        const double t = values[i] + (values[i + 1] - values[i]) / 2.0;
        std::array<std::size_t, 2> left{0, 0}, right{0, 0}, parent{0, 0};
        for (std::size_t r = 0; r < n; ++r) {
          ++parent[static_cast<std::size_t>(y[r])];
          ++(x(r, f) <= t ? left : right)[static_cast<std::size_t>(y[r])];
        }
        const double g = information_gain(parent, left, right, 2.0);
        if (g > best + 1e-12) {
          best = g;
          best_f = f;
          best_t = t;
        }
      }
    }
    const DecisionTree tree = fit_tree(x, y);
    if (best < 0.0) {
      if (tree.nodes.size() != 1) return format("trial %d: tree split data with no candidate", trial);
      continue;
    }
    const auto& root = tree.nodes[0];
    if (root.is_leaf() || static_cast<std::size_t>(root.feature) != best_f || root.threshold != best_t) {
      return format("trial %d: root split differs from exhaustive best (feature %zu, threshold %g)", trial,
                    best_f, best_t);
    }
  }
  return "";
}

std::string gbt_oracle() {
  Prng prng(99);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + prng.below(40);
    Matrix x(n, 2);
    std::vector<double> target(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x(i, 0) = prng.uniform();
      x(i, 1) = prng.uniform();
      target[i] = prng.uniform() * 10.0 - 5.0;
      mean += target[i];
    }
    mean /= static_cast<double>(n);
    GbtParams p;
    p.n_rounds = 1;
    p.max_depth = 0;
    p.lambda = 0.0;
    p.learning_rate = 1.0;
    p.base_score = 0.0;
    p.loss = BoostLoss::kSquaredError;
    const BoostedModel m = fit_gbt(x, std::span<const double>(target), p);
    worst = std::max(worst, std::abs(m.trees[0].nodes[0].weight - mean));
  }
  return worst < 1e-12 ? "" : format("max |leaf weight - mean residual| = %.3g", worst);
}

std::string logistic_oracle() {
  Prng prng(5);
  constexpr double eps = 1e-4;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double m = prng.uniform() * 12.0 - 6.0;
    const double y = static_cast<double>(prng.below(2));
    const double g = (logistic_loss(y, m + eps) - logistic_loss(y, m - eps)) / (2.0 * eps);
    const double h = (logistic_gradient(y, m + eps) - logistic_gradient(y, m - eps)) / (2.0 * eps);
    worst = std::max({worst, std::abs(g - logistic_gradient(y, m)), std::abs(h - logistic_hessian(m))});
  }
  return worst < 1e-6 ? "" : format("max |analytic - finite difference| = %.3g", worst);
}

std::string scaler_oracle() {
  Prng prng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + prng.below(60), d = 1 + prng.below(5);
    Matrix x(n, d);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < d; ++c) x(r, c) = prng.uniform() * 1000.0 - 300.0;
    }
    const Matrix z = apply_scaler(x, fit_scaler(x, all_columns(d)));
    for (std::size_t c = 0; c < d; ++c) {
      double mean = 0.0, var = 0.0;
      for (std::size_t r = 0; r < n; ++r) mean += z(r, c);
      mean /= static_cast<double>(n);
      for (std::size_t r = 0; r < n; ++r) var += (z(r, c) - mean) * (z(r, c) - mean);
      const double sd = std::sqrt(var / static_cast<double>(n));
      if (std::abs(mean) >= 1e-9 || std::abs(sd - 1.0) >= 1e-9) {
        return format("trial %d column %zu: mean %.3g std %.12g", trial, c, mean, sd);
      }
    }
  }
  return "";
}

std::string smote_oracle() {
  Prng prng(8);
  double worst = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n_min = 3 + prng.below(8), n_maj = n_min + 1 + prng.below(20);
    const std::size_t d = 1 + prng.below(4);
    Dataset ds;
    for (std::size_t c = 0; c < d; ++c) ds.schema.columns.push_back({"x" + std::to_string(c), ColumnKind::kContinuous, ""});
    ds.schema.target_name = "y";
    ds.rows = Matrix(n_min + n_maj, d);
    ds.labels.assign(n_min + n_maj, 0);
    for (std::size_t r = 0; r < ds.rows.rows(); ++r) {
      for (std::size_t c = 0; c < d; ++c) ds.rows(r, c) = prng.uniform() * 100.0 - 50.0;
      if (r < n_min) ds.labels[r] = 1;
    }
    const Dataset out = smote(ds, {n_min - 1, prng(), 1.0});
    const Matrix& x = ds.rows;
    for (std::size_t s = x.rows(); s < out.size(); ++s) {
      double best = INFINITY;
      for (std::size_t a = 0; a < n_min; ++a) {
        for (std::size_t b = a + 1; b < n_min; ++b) {
          double ab2 = 0.0, t = 0.0;
          for (std::size_t c = 0; c < d; ++c) {
            const double e = x(b, c) - x(a, c);
            ab2 += e * e;
            t += (out.rows(s, c) - x(a, c)) * e;
          }
          t = std::clamp(t / ab2, 0.0, 1.0);
          double dist2 = 0.0;
          for (std::size_t c = 0; c < d; ++c) {
            const double p = x(a, c) + t * (x(b, c) - x(a, c)) - out.rows(s, c);
            dist2 += p * p;
          }
          best = std::min(best, std::sqrt(dist2));
        }
      }
      worst = std::max(worst, best);
    }
  }
  return worst < 1e-9 ? "" : format("max distance to a minority segment = %.3g", worst);
}

std::string fcm_oracle() {
  Prng prng(12);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 5 + prng.below(60), d = 1 + prng.below(4);
    Matrix x(n, d);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < d; ++c) x(r, c) = prng.uniform() * 10.0;
    }
    FcmParams p;
    p.c = 2 + prng.below(3);
    p.m = 1.5 + prng.uniform() * 1.5;
    p.seed = prng();
    const auto check = [&](const Matrix& u) {
      for (std::size_t r = 0; r < u.rows(); ++r) {
        double sum = 0.0;
        for (std::size_t j = 0; j < u.cols(); ++j) sum += u(r, j);
        worst = std::max(worst, std::abs(sum - 1.0));
      }
    };
    const FcmModel model = fcm_fit(x, p, [&](std::size_t, const Matrix& u, const Matrix&, double) { check(u); });
    check(model.memberships);
  }
  return worst < 1e-9 ? "" : format("max |row sum - 1| = %.3g", worst);
}

std::string kmeans_oracle() {
  Prng prng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + prng.below(80), d = 1 + prng.below(4);
    Matrix x(n, d);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < d; ++c) x(r, c) = prng.uniform() * 10.0;
    }
    KMeansParams p;
    p.k = 1 + prng.below(std::min<std::size_t>(n, 5));
    p.seed = prng();
    const KMeansModel m = kmeans_fit(x, p);
    for (std::size_t i = 1; i < m.inertia_trace.size(); ++i) {
      if (m.inertia_trace[i] > m.inertia_trace[i - 1] * (1.0 + 1e-12)) {
        return format("trial %d: inertia rose from %.17g to %.17g", trial, m.inertia_trace[i - 1],
                      m.inertia_trace[i]);
      }
    }
  }
  return "";
}

Outcome oracle_suite() {
  const std::vector<OracleCheck> checks{
      {"AUC vs pairwise probability, 200 instances", auc_oracle},
      {"root split vs exhaustive enumeration, 100 instances", split_oracle},
      {"squared-error leaf weight equals mean residual", gbt_oracle},
      {"logistic gradient/hessian vs central differences", logistic_oracle},
      {"scaler moments", scaler_oracle},
      {"SMOTE convex-combination residual", smote_oracle},
      {"FCM membership row sums", fcm_oracle},
      {"K-Means inertia non-increasing", kmeans_oracle},
  };
  Outcome o;
  o.pass = true;
  for (const auto& c : checks) {
    std::string problem;
    try {
      problem = c.run();
    } catch (const std::exception& e) {
      problem = std::string("threw: ") + e.what();
    }
    if (problem.empty()) {
      o.note(std::string("ok   ") + c.name);
    } else {
      o.fail(std::string("FAIL ") + c.name + ": " + problem);
    }
  }
  return o;
}

// ---------------------------------------------------------------------------

Outcome guarded(const std::function<Outcome()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    Outcome o;
    return o.fail(std::string("error: ") + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hfstack acceptance criteria"};
  std::string data, cli, work = "acceptance_work";
  app.add_option("--data", data, "Canonical heart-failure CSV")->required();
  app.add_option("--cli", cli, "Path to the hfstack executable")->required();
  app.add_option("--work", work, "Scratch directory");
  CLI11_PARSE(app, argc, argv);

  const fs::path work_dir = fs::absolute(work);
  fs::remove_all(work_dir);
  fs::create_directories(work_dir);

  int failures = 0;
  const auto report = [&](int id, const std::string& title, const Outcome& o) {
    std::printf("%s criterion %d: %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str());
    for (const auto& line : o.details) std::printf("    %s\n", line.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  };

  const bool have_data = fs::is_regular_file(data);
  const auto missing = [&] {
    Outcome o;
    o.fail("canonical dataset not found at " + data);
    o.note("place heart_failure_clinical_records_dataset.csv there or configure with -DHFSTACK_DATA_FILE=...");
    return o;
  };

  // Criteria 6 and 8 exercise the CLI plumbing; without the canonical file they
  // run on a synthetic stand-in with the same schema.
  fs::path plumbing_data = data;
  if (!have_data) {
    plumbing_data = testing::write_synthetic_heart_csv(work_dir);
    std::printf("note: canonical dataset missing; criteria 6 and 8 use the synthetic stand-in %s\n",
                plumbing_data.string().c_str());
  }

  report(1, "dataset fidelity (299 rows 203/96, SMOTE to 406 rows 203/203)",
         have_data ? guarded([&] { return dataset_fidelity(data); }) : missing());
  report(2, "correlation ranking (time first, then EF, creatinine, age, sodium)",
         have_data ? guarded([&] { return correlation_ranking(data); }) : missing());

  if (have_data) {
    double elapsed = 0.0;
    std::vector<SeedRun> runs;
    Outcome error;
    try {
      runs = supervised_runs(data, elapsed);
    } catch (const std::exception& e) {
      error.fail(std::string("error: ") + e.what());
    }
    report(3, "paper-protocol accuracy over seeds 0-9 (stack >= 0.93, RF and GBT >= 0.88)",
           runs.empty() ? error : supervised_accuracy(runs, elapsed));
    report(4, "paper-protocol AUC over seeds 0-9 (stack >= 0.95, RF >= 0.93)",
           runs.empty() ? error : supervised_auc(runs));
    report(5, "clustering accuracy bands for 8 of 10 seeds", guarded([&] { return clustering_bands(data); }));
  } else {
    Outcome o = missing();
    o.note("published stack accuracy 0.9998; measured mean unavailable, gap to 0.9998 unknown");
    report(3, "paper-protocol accuracy over seeds 0-9 (stack >= 0.93, RF and GBT >= 0.88)", o);
    report(4, "paper-protocol AUC over seeds 0-9 (stack >= 0.95, RF >= 0.93)", missing());
    report(5, "clustering accuracy bands for 8 of 10 seeds", missing());
  }

  report(6, std::string("sound-protocol report and comparison table") +
                (have_data ? "" : " [synthetic stand-in data]"),
         guarded([&] { return sound_protocol_report(cli, plumbing_data, work_dir); }));
  report(7, "oracle equivalence suite", guarded(oracle_suite));
  report(8, std::string("determinism (byte-identical metrics.json, thread-independent forest)") +
                (have_data ? "" : " [synthetic stand-in data]"),
         guarded([&] { return determinism(cli, plumbing_data, work_dir); }));

  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
