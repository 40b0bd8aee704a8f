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

#ifndef HFSTACK_FOREST_HPP_
#define HFSTACK_FOREST_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "hfstack/decision_tree.hpp"
#include "hfstack/error.hpp"
#include "hfstack/matrix.hpp"
#include "hfstack/random.hpp"

namespace hfstack {

struct ForestParams {
  std::size_t n_trees = 100;
  // feature_subset left unset means floor(sqrt(d)).
  TreeParams tree;
  bool bootstrap = true;
  std::uint64_t seed = 0;
  // Worker threads for tree fitting; 0 picks hardware concurrency. Results do
  // not depend on this value.
  std::size_t n_threads = 1;
};

struct ForestModel {
  std::size_t num_features = 0;
  std::vector<DecisionTree> trees;
  // oob_rows[t]: training rows absent from tree t's bootstrap sample, ascending.
  std::vector<std::vector<std::size_t>> oob_rows;
  std::optional<double> oob_error;

  // Majority vote (ties to class 0); score is the fraction of positive votes.
  Prediction predict(std::span<const double> x) const {
    if (x.size() != num_features) {
      fail(ErrorKind::kDimensionMismatch, "forest expects " + std::to_string(num_features) +
                                              " features, got " + std::to_string(x.size()));
    }
    std::size_t positive = 0;
    for (const auto& t : trees) positive += t.predict(x).label == 1;
    const std::size_t negative = trees.size() - positive;
    return {positive > negative ? 1 : 0,
            static_cast<double>(positive) / static_cast<double>(trees.size())};
  }

  friend bool operator==(const ForestModel&, const ForestModel&) = default;
};

inline Prediction predict_forest(const ForestModel& m, std::span<const double> x) {
  return m.predict(x);
}

inline std::size_t default_feature_subset(std::size_t d) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d)))));
}

namespace detail {

// Runs body(i) for i in [0, count) on up to n_threads workers.
template <class Body>
void parallel_for(std::size_t count, std::size_t n_threads, Body&& body) {
  if (n_threads == 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min(n_threads, count);
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(n_threads);
  for (std::size_t w = 0; w < n_threads; ++w) {
    workers.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

/// Bagged entropy trees with per-node feature subsampling.
///
/// Tree t draws its bootstrap sample and its feature subsets from
/// Prng(derive_seed(seed, t)), so the forest is a pure function of the data
/// and the seed whatever the thread count, and adding trees leaves the
/// earlier ones unchanged.
inline ForestModel fit_forest(const Matrix& x, const Labels& y, const ForestParams& params) {
  const std::size_t n = x.rows(), d = x.cols();
  if (n == 0) fail(ErrorKind::kEmptyInput, "cannot fit a forest on zero rows");
  if (y.size() != n) fail(ErrorKind::kLengthMismatch, "X and y differ in length");
  if (params.n_trees < 1) fail(ErrorKind::kInvalidArgument, "n_trees must be >= 1");
  require_binary(y);

  TreeParams tree_params = params.tree;
  if (!tree_params.feature_subset) tree_params.feature_subset = default_feature_subset(d);
  if (*tree_params.feature_subset < 1 || *tree_params.feature_subset > d) {
    fail(ErrorKind::kInvalidArgument, "feature_subset must lie in [1, d]");
  }
  validate(tree_params);

  ForestModel model;
  model.num_features = d;
  model.trees.resize(params.n_trees);
  model.oob_rows.resize(params.n_trees);

  detail::parallel_for(params.n_trees, params.n_threads, [&](std::size_t t) {
    Prng prng(derive_seed(params.seed, t));
    std::vector<std::size_t> rows(n);
    if (params.bootstrap) {
      std::vector<bool> drawn(n, false);
      for (auto& r : rows) {
        r = static_cast<std::size_t>(prng.below(n));
        drawn[r] = true;
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (!drawn[i]) model.oob_rows[t].push_back(i);
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) rows[i] = i;
    }
    model.trees[t] = fit_tree(x, y, std::move(rows), tree_params, prng);
  });

  // Out-of-bag majority vote for every row that some tree left out.
  std::vector<std::size_t> votes(n, 0), positive(n, 0);
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    for (auto r : model.oob_rows[t]) {
      ++votes[r];
      positive[r] += model.trees[t].predict(x.row(r)).label == 1;
    }
  }
  std::size_t evaluated = 0, wrong = 0;
  for (std::size_t r = 0; r < n; ++r) {
    if (votes[r] == 0) continue;
    ++evaluated;
    const Label vote = 2 * positive[r] > votes[r] ? 1 : 0;
    wrong += vote != y[r];
  }
  if (evaluated > 0) {
    model.oob_error = static_cast<double>(wrong) / static_cast<double>(evaluated);
  }
  return model;
}

}  // namespace hfstack

#endif  // HFSTACK_FOREST_HPP_
