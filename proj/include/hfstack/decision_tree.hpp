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

#ifndef HFSTACK_DECISION_TREE_HPP_
#define HFSTACK_DECISION_TREE_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "hfstack/error.hpp"
#include "hfstack/matrix.hpp"
#include "hfstack/random.hpp"

namespace hfstack {

// H = -sum_y P(y) log_b P(y), with 0 log 0 = 0.
inline double entropy(std::span<const std::size_t> counts, double base = 2.0) {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) fail(ErrorKind::kEmptySet, "entropy of an empty set");
  const double n = static_cast<double>(total);
  const double log_base = std::log(base);
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p) / log_base;
  }
  return h;
}

inline double information_gain(std::span<const std::size_t> parent,
                               std::span<const std::size_t> left,
                               std::span<const std::size_t> right, double base = 2.0) {
  if (left.size() != parent.size() || right.size() != parent.size()) {
    fail(ErrorKind::kInconsistentCounts, "count vectors differ in length");
  }
  std::size_t n_left = 0, n_right = 0;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (left[i] + right[i] != parent[i]) {
      fail(ErrorKind::kInconsistentCounts, "left + right does not equal parent");
    }
    n_left += left[i];
    n_right += right[i];
  }
  if (n_left == 0 || n_right == 0) fail(ErrorKind::kEmptyChild, "split leaves a child empty");
  const double n = static_cast<double>(n_left + n_right);
  const double gain = entropy(parent, base) - (static_cast<double>(n_left) / n) * entropy(left, base) -
                      (static_cast<double>(n_right) / n) * entropy(right, base);
  return std::max(0.0, gain);
}

struct TreeParams {
  std::optional<std::size_t> max_depth;  // root has depth 0; unset = unlimited
  std::size_t min_samples_split = 2;
  double min_gain = 0.0;                      // a split needs gain >= min_gain
  std::optional<std::size_t> feature_subset;  // features drawn per node
  double log_base = 2.0;
};

inline void validate(const TreeParams& p) {
  if (p.min_samples_split < 2) fail(ErrorKind::kInvalidArgument, "min_samples_split must be >= 2");
  if (!(p.min_gain >= 0.0)) fail(ErrorKind::kInvalidArgument, "min_gain must be >= 0");
  if (!(p.log_base > 1.0)) fail(ErrorKind::kInvalidArgument, "log base must exceed 1");
  if (p.feature_subset && *p.feature_subset == 0) {
    fail(ErrorKind::kInvalidArgument, "feature_subset must be positive");
  }
}

// Positive-class score plus the thresholded decision.
struct Prediction {
  Label label = 0;
  double score = 0.0;
};

struct TreeNode {
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  // Internal nodes: rows with x[feature] <= threshold go left.
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::uint32_t left = kNone;
  std::uint32_t right = kNone;
  // Training rows reaching the node, per class.
  std::array<std::size_t, 2> counts{0, 0};

  bool is_leaf() const noexcept { return feature < 0; }
  // Majority with ties to class 0.
  Label majority() const noexcept { return counts[1] > counts[0] ? 1 : 0; }
  double positive_fraction() const noexcept {
    const auto n = counts[0] + counts[1];
    return n == 0 ? 0.0 : static_cast<double>(counts[1]) / static_cast<double>(n);
  }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTree {
  std::size_t num_features = 0;
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  std::size_t depth() const {
    std::size_t best = 0;
    std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
      auto [id, d] = stack.back();
      stack.pop_back();
      best = std::max(best, d);
      if (!nodes[id].is_leaf()) {
        stack.emplace_back(nodes[id].left, d + 1);
        stack.emplace_back(nodes[id].right, d + 1);
      }
    }
    return best;
  }

  std::size_t leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
  }

  const TreeNode& leaf_for(std::span<const double> x) const {
    if (x.size() != num_features) {
      fail(ErrorKind::kDimensionMismatch, "tree expects " + std::to_string(num_features) +
                                              " features, got " + std::to_string(x.size()));
    }
    std::uint32_t id = 0;
    while (!nodes[id].is_leaf()) {
      const auto& n = nodes[id];
      id = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[id];
  }

  Prediction predict(std::span<const double> x) const {
    const auto& leaf = leaf_for(x);
    return {leaf.majority(), leaf.positive_fraction()};
  }

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

inline Prediction predict_tree(const DecisionTree& tree, std::span<const double> x) {
  return tree.predict(x);
}

struct SplitChoice {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = -std::numeric_limits<double>::infinity();
  bool found = false;
};

/// Best entropy split of `rows` over `features`.
///
/// Candidate thresholds are midpoints between consecutive distinct values.
/// Features are scanned in the given order and thresholds in ascending
/// order; only a strictly larger gain replaces the incumbent, so ties go to
/// the earlier feature and then to the lower threshold.
inline SplitChoice best_entropy_split(const Matrix& x, const Labels& y,
                                      std::span<const std::size_t> rows,
                                      std::span<const std::size_t> features, double base) {
  std::array<std::size_t, 2> parent{0, 0};
  for (auto r : rows) ++parent[static_cast<std::size_t>(y[r])];

  SplitChoice best;
  std::vector<std::size_t> order(rows.begin(), rows.end());
  for (auto f : features) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
    std::array<std::size_t, 2> left{0, 0};
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      ++left[static_cast<std::size_t>(y[order[i]])];
      const double lo = x(order[i], f), hi = x(order[i + 1], f);
      if (!(lo < hi)) continue;
      const std::array<std::size_t, 2> right{parent[0] - left[0], parent[1] - left[1]};
      const double gain = information_gain(parent, left, right, base);
      if (gain > best.gain) {
        best = {f, lo + (hi - lo) / 2.0, gain, true};
      }
    }
  }
  return best;
}

namespace detail {

struct GrowTask {
  std::uint32_t node;
  std::vector<std::size_t> rows;
  std::size_t depth;
};

}  // namespace detail

/// Greedy top-down growth over `rows` (duplicates act as weights, which is
/// how bootstrap samples are passed in).
inline DecisionTree fit_tree(const Matrix& x, const Labels& y, std::vector<std::size_t> rows,
                             const TreeParams& params, Prng& prng) {
  validate(params);
  if (rows.empty()) fail(ErrorKind::kEmptyInput, "cannot grow a tree on zero rows");
  if (x.rows() != y.size()) fail(ErrorKind::kLengthMismatch, "X and y differ in length");
  require_binary(y);

  const std::size_t d = x.cols();
  DecisionTree tree;
  tree.num_features = d;
  tree.nodes.emplace_back();

  std::vector<std::size_t> all_features(d);
  std::iota(all_features.begin(), all_features.end(), std::size_t{0});
  const std::size_t subset = params.feature_subset ? std::min(*params.feature_subset, d) : d;

  // Depth-first with an explicit stack; left child is processed first.
  std::vector<detail::GrowTask> stack;
  stack.push_back({0, std::move(rows), 0});
  while (!stack.empty()) {
    auto task = std::move(stack.back());
    stack.pop_back();
    auto& counts = tree.nodes[task.node].counts;
    for (auto r : task.rows) ++counts[static_cast<std::size_t>(y[r])];

    const bool pure = counts[0] == 0 || counts[1] == 0;
    const bool too_deep = params.max_depth && task.depth >= *params.max_depth;
    if (pure || too_deep || task.rows.size() < params.min_samples_split || d == 0) continue;

    std::vector<std::size_t> features;
    if (subset < d) {
      features = prng.sample_without_replacement(d, subset);
      std::sort(features.begin(), features.end());
    } else {
      features = all_features;
    }
    const auto split = best_entropy_split(x, y, task.rows, features, params.log_base);
    if (!split.found || split.gain < params.min_gain) continue;

    std::vector<std::size_t> left_rows, right_rows;
    for (auto r : task.rows) {
      (x(r, split.feature) <= split.threshold ? left_rows : right_rows).push_back(r);
    }
    const auto left_id = static_cast<std::uint32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    auto& node = tree.nodes[task.node];
    node.feature = static_cast<std::int32_t>(split.feature);
    node.threshold = split.threshold;
    node.left = left_id;
    node.right = left_id + 1;
    stack.push_back({left_id + 1, std::move(right_rows), task.depth + 1});
    stack.push_back({left_id, std::move(left_rows), task.depth + 1});
  }
  return tree;
}

inline DecisionTree fit_tree(const Matrix& x, const Labels& y, const TreeParams& params,
                             Prng& prng) {
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return fit_tree(x, y, std::move(rows), params, prng);
}

inline DecisionTree fit_tree(const Matrix& x, const Labels& y, const TreeParams& params = {}) {
  Prng prng(0);
  return fit_tree(x, y, params, prng);
}

}  // namespace hfstack

#endif  // HFSTACK_DECISION_TREE_HPP_
