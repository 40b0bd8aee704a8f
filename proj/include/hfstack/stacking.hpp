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

#ifndef HFSTACK_STACKING_HPP_
#define HFSTACK_STACKING_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "hfstack/boosting.hpp"
#include "hfstack/decision_tree.hpp"
#include "hfstack/error.hpp"
#include "hfstack/forest.hpp"
#include "hfstack/matrix.hpp"
#include "hfstack/preprocess.hpp"
#include "hfstack/random.hpp"

namespace hfstack {

// Predicts the same score for every input. Handy as a reference learner.
struct ConstantLearner {
  double score = 0.5;
  friend bool operator==(const ConstantLearner&, const ConstantLearner&) = default;
};

struct ConstantModel {
  double score = 0.5;
  std::size_t num_features = 0;
  Prediction predict(std::span<const double> x) const {
    if (x.size() != num_features) fail(ErrorKind::kDimensionMismatch, "constant model width");
    return {score > 0.5 ? 1 : 0, score};
  }
  friend bool operator==(const ConstantModel&, const ConstantModel&) = default;
};

using LearnerSpec = std::variant<TreeParams, ForestParams, GbtParams, ConstantLearner>;
using Model = std::variant<DecisionTree, ForestModel, BoostedModel, ConstantModel>;

// Fits one learner with all randomness drawn from `seed`; a forest's own
// params.seed is ignored.
inline Model fit_learner(const LearnerSpec& spec, const Matrix& x, const Labels& y,
                         std::uint64_t seed, std::size_t n_threads = 1) {
  return std::visit(
      [&](const auto& s) -> Model {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, TreeParams>) {
          Prng prng(seed);
          return fit_tree(x, y, s, prng);
        } else if constexpr (std::is_same_v<S, ForestParams>) {
          ForestParams p = s;
          p.seed = seed;
          p.n_threads = n_threads;
          return fit_forest(x, y, p);
        } else if constexpr (std::is_same_v<S, GbtParams>) {
          return fit_gbt(x, y, s);
        } else {
          if (x.rows() == 0) fail(ErrorKind::kEmptyInput, "cannot fit on zero rows");
          return ConstantModel{s.score, x.cols()};
        }
      },
      spec);
}

inline Prediction predict(const Model& model, std::span<const double> x) {
  return std::visit([&](const auto& m) { return m.predict(x); }, model);
}

inline std::string learner_name(const LearnerSpec& spec) {
  switch (spec.index()) {
    case 0: return "dtree";
    case 1: return "forest";
    case 2: return "gbt";
    default: return "constant";
  }
}

struct KFoldScheme {
  std::size_t k = 5;
};
struct HoldoutScheme {
  double fraction = 0.5;  // share of rows held out for the meta learner
};
using StackScheme = std::variant<KFoldScheme, HoldoutScheme>;

enum class MetaInput { kScores, kLabels };

struct StackConfig {
  std::vector<LearnerSpec> base_specs{TreeParams{}, ForestParams{}, GbtParams{}};
  ForestParams meta_spec;
  StackScheme scheme = KFoldScheme{};
  MetaInput meta_input = MetaInput::kScores;
  std::uint64_t seed = 0;
  std::size_t n_threads = 1;
};

inline void validate(const StackConfig& cfg) {
  if (cfg.base_specs.empty()) fail(ErrorKind::kInvalidArgument, "stack needs a base learner");
  if (const auto* kf = std::get_if<KFoldScheme>(&cfg.scheme); kf && kf->k < 2) {
    fail(ErrorKind::kInvalidArgument, "k-fold stacking needs k >= 2");
  }
  if (const auto* ho = std::get_if<HoldoutScheme>(&cfg.scheme);
      ho && !(ho->fraction > 0.0 && ho->fraction < 1.0)) {
    fail(ErrorKind::kInvalidArgument, "holdout fraction must lie in (0, 1)");
  }
}

struct MetaFeatures {
  Matrix values;                  // rows.size() x B
  std::vector<std::size_t> rows;  // training rows covered, ascending
  // Fold that scored each training row; -1 for rows used only for fitting
  // (the implementable part of a holdout scheme).
  std::vector<int> fold_of_row;
};

// Reports, for every base fit made while building meta-features, which rows
// it trained on and which rows it scored.
using FoldObserver = std::function<void(std::size_t fold, std::size_t learner,
                                        std::span<const std::size_t> train_rows,
                                        std::span<const std::size_t> scored_rows)>;

namespace detail {

enum : std::uint64_t { kFoldStream = 1, kBaseStream = 2, kRefitStream = 3, kMetaStream = 4 };

inline std::uint64_t stack_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t a = 0,
                                std::uint64_t b = 0) {
  return derive_seed(derive_seed(derive_seed(seed, stream), a), b);
}

inline double meta_value(const Prediction& p, MetaInput input) {
  return input == MetaInput::kScores ? p.score : static_cast<double>(p.label);
}

}  // namespace detail

/// Out-of-sample base-learner scores for the meta learner.
///
/// k-fold: rows are shuffled into k folds; for each fold every base learner
/// is fitted on the other folds and scores the fold, so each row's
/// meta-features come from models that never saw it. Holdout: bases are
/// fitted on the implementable part and score the held-out part only.
inline MetaFeatures build_meta_features(const Matrix& x, const Labels& y, const StackConfig& cfg,
                                        const FoldObserver& observer = {}) {
  validate(cfg);
  const std::size_t n = x.rows(), nb = cfg.base_specs.size();
  if (y.size() != n) fail(ErrorKind::kLengthMismatch, "X and y differ in length");

  Prng fold_rng(detail::stack_seed(cfg.seed, detail::kFoldStream));
  const auto perm = fold_rng.permutation(n);
  std::vector<int> fold_of(n, -1);
  std::size_t n_folds = 0;
  if (const auto* kf = std::get_if<KFoldScheme>(&cfg.scheme)) {
    if (n < kf->k) {
      fail(ErrorKind::kFoldTooSmall, std::to_string(n) + " rows cannot fill " +
                                         std::to_string(kf->k) + " folds");
    }
    n_folds = kf->k;
    for (std::size_t i = 0; i < n; ++i) fold_of[perm[i]] = static_cast<int>(i % kf->k);
  } else {
    const auto& ho = std::get<HoldoutScheme>(cfg.scheme);
    const std::size_t held = test_count(ho.fraction, n);
    if (held == 0 || held == n) {
      fail(ErrorKind::kFoldTooSmall, "holdout split leaves one side empty");
    }
    n_folds = 1;
    for (std::size_t i = 0; i < held; ++i) fold_of[perm[i]] = 0;
  }

  MetaFeatures meta;
  meta.fold_of_row = fold_of;
  for (std::size_t i = 0; i < n; ++i) {
    if (fold_of[i] >= 0) meta.rows.push_back(i);
  }
  std::vector<std::size_t> position(n, 0);
  for (std::size_t i = 0; i < meta.rows.size(); ++i) position[meta.rows[i]] = i;
  meta.values = Matrix(meta.rows.size(), nb);

  std::vector<std::vector<std::size_t>> train_rows(n_folds), scored_rows(n_folds);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < n_folds; ++f) {
      (fold_of[i] == static_cast<int>(f) ? scored_rows[f] : train_rows[f]).push_back(i);
    }
  }

  detail::parallel_for(n_folds * nb, cfg.n_threads, [&](std::size_t task) {
    const std::size_t f = task / nb, b = task % nb;
    const Matrix xf = x.select_rows(train_rows[f]);
    const Labels yf = select_labels(y, train_rows[f]);
    const Model m = fit_learner(cfg.base_specs[b], xf, yf,
                                detail::stack_seed(cfg.seed, detail::kBaseStream, f, b));
    for (auto r : scored_rows[f]) {
      meta.values(position[r], b) = detail::meta_value(predict(m, x.row(r)), cfg.meta_input);
    }
  });
  if (observer) {
    for (std::size_t f = 0; f < n_folds; ++f) {
      for (std::size_t b = 0; b < nb; ++b) observer(f, b, train_rows[f], scored_rows[f]);
    }
  }
  return meta;
}

struct StackedModel {
  StackConfig config;
  std::vector<Model> base_models;  // refitted on all training rows
  ForestModel meta_model;

  std::vector<double> meta_row(std::span<const double> x) const {
    std::vector<double> z;
    z.reserve(base_models.size());
    for (const auto& m : base_models) {
      z.push_back(detail::meta_value(hfstack::predict(m, x), config.meta_input));
    }
    return z;
  }

  Prediction predict(std::span<const double> x) const { return meta_model.predict(meta_row(x)); }
};

inline StackedModel fit_stack(const Matrix& x, const Labels& y, const StackConfig& cfg) {
  require_binary(y);
  const auto meta = build_meta_features(x, y, cfg);

  StackedModel model;
  model.config = cfg;
  ForestParams meta_params = cfg.meta_spec;
  meta_params.seed = detail::stack_seed(cfg.seed, detail::kMetaStream);
  meta_params.n_threads = cfg.n_threads;
  model.meta_model = fit_forest(meta.values, select_labels(y, meta.rows), meta_params);

  model.base_models.resize(cfg.base_specs.size());
  for (std::size_t b = 0; b < cfg.base_specs.size(); ++b) {
    model.base_models[b] = fit_learner(cfg.base_specs[b], x, y,
                                       detail::stack_seed(cfg.seed, detail::kRefitStream, b),
                                       cfg.n_threads);
  }
  return model;
}

inline Prediction predict_stack(const StackedModel& m, std::span<const double> x) {
  return m.predict(x);
}

}  // namespace hfstack

#endif  // HFSTACK_STACKING_HPP_
