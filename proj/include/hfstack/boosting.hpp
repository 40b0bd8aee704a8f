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

#ifndef HFSTACK_BOOSTING_HPP_
#define HFSTACK_BOOSTING_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "hfstack/decision_tree.hpp"
#include "hfstack/error.hpp"
#include "hfstack/matrix.hpp"

namespace hfstack {

// Second-order view of the regularized objective
//   sum_i L(y_i, yhat_i) + sum_k (gamma * T_k + 1/2 * lambda * ||w_k||^2).
// For one leaf with gradient sum G and hessian sum H the quadratic
// G w + 1/2 (H + lambda) w^2 is minimized at w* = -G / (H + lambda), which
// contributes -1/2 G^2 / (H + lambda) to the objective.

inline double leaf_weight(double grad_sum, double hess_sum, double lambda) {
  const double denom = hess_sum + lambda;
  if (!(denom > 0.0)) fail(ErrorKind::kDegenerateDenominator, "H + lambda must be positive");
  return -grad_sum / denom;
}

inline double split_gain(double g_left, double h_left, double g_right, double h_right,
                         double lambda, double gamma) {
  if (!(h_left + lambda > 0.0) || !(h_right + lambda > 0.0)) {
    fail(ErrorKind::kDegenerateDenominator, "child H + lambda must be positive");
  }
  const double g = g_left + g_right, h = h_left + h_right;
  return 0.5 * (g_left * g_left / (h_left + lambda) + g_right * g_right / (h_right + lambda) -
                g * g / (h + lambda)) -
         gamma;
}

inline double sigmoid(double margin) {
  if (margin >= 0.0) return 1.0 / (1.0 + std::exp(-margin));
  const double e = std::exp(margin);
  return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

// Binary log-loss in terms of the raw margin: log(1 + e^m) - y m.
inline double logistic_loss(double y, double margin) {
  return std::max(margin, 0.0) + std::log1p(std::exp(-std::abs(margin))) - y * margin;
}
inline double logistic_gradient(double y, double margin) { return sigmoid(margin) - y; }
inline double logistic_hessian(double margin) {
  const double p = sigmoid(margin);
  return p * (1.0 - p);
}

enum class BoostLoss { kLogistic, kSquaredError };

struct GbtParams {
  std::size_t n_rounds = 100;
  double learning_rate = 0.1;
  double lambda = 1.0;
  double gamma = 0.0;
  std::size_t max_depth = 3;  // 0 grows single-leaf trees
  // Probability for the logistic loss, raw prediction for squared error.
  double base_score = 0.5;
  BoostLoss loss = BoostLoss::kLogistic;

  friend bool operator==(const GbtParams&, const GbtParams&) = default;
};

inline void validate(const GbtParams& p) {
  if (p.n_rounds < 1) fail(ErrorKind::kInvalidArgument, "n_rounds must be >= 1");
  if (!(p.learning_rate > 0.0 && p.learning_rate <= 1.0)) {
    fail(ErrorKind::kInvalidArgument, "learning_rate must lie in (0, 1]");
  }
  if (!(p.lambda >= 0.0) || !(p.gamma >= 0.0)) {
    fail(ErrorKind::kInvalidArgument, "lambda and gamma must be >= 0");
  }
  if (p.loss == BoostLoss::kLogistic && !(p.base_score > 0.0 && p.base_score < 1.0)) {
    fail(ErrorKind::kInvalidArgument, "logistic base_score must lie in (0, 1)");
  }
}

struct RegressionNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  double weight = 0.0;  // leaf output, unscaled by the learning rate

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const RegressionNode&, const RegressionNode&) = default;
};

struct RegressionTree {
  std::vector<RegressionNode> nodes;

  double value(std::span<const double> x) const {
    std::uint32_t id = 0;
    while (!nodes[id].is_leaf()) {
      const auto& n = nodes[id];
      id = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[id].weight;
  }

  friend bool operator==(const RegressionTree&, const RegressionTree&) = default;
};

struct BoostedModel {
  std::size_t num_features = 0;
  GbtParams params;
  std::vector<RegressionTree> trees;

  double base_margin() const {
    return params.loss == BoostLoss::kLogistic ? logit(params.base_score) : params.base_score;
  }

  double margin(std::span<const double> x) const {
    if (x.size() != num_features) {
      fail(ErrorKind::kDimensionMismatch, "booster expects " + std::to_string(num_features) +
                                              " features, got " + std::to_string(x.size()));
    }
    double sum = 0.0;
    for (const auto& t : trees) sum += t.value(x);
    return base_margin() + params.learning_rate * sum;
  }

  // Probability of class 1; label is probability >= 0.5.
  Prediction predict(std::span<const double> x) const {
    const double p = sigmoid(margin(x));
    return {p >= 0.5 ? 1 : 0, p};
  }

  friend bool operator==(const BoostedModel&, const BoostedModel&) = default;
};

inline Prediction predict_gbt(const BoostedModel& m, std::span<const double> x) {
  return m.predict(x);
}

/// Exact greedy second-order regression tree over given gradients/hessians.
///
/// Every feature's midpoints between consecutive distinct values are scored
/// with split_gain; the best strictly positive gain is taken (ties to the
/// lower feature, then the lower threshold). Leaves get leaf_weight().
inline RegressionTree grow_regression_tree(const Matrix& x, std::span<const double> grad,
                                           std::span<const double> hess, std::size_t max_depth,
                                           double lambda, double gamma) {
  struct Task {
    std::uint32_t node;
    std::vector<std::size_t> rows;
    std::size_t depth;
  };
  RegressionTree tree;
  tree.nodes.emplace_back();
  std::vector<std::size_t> all(x.rows());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<Task> stack;
  stack.push_back({0, std::move(all), 0});

  while (!stack.empty()) {
    Task task = std::move(stack.back());
    stack.pop_back();
    double g_sum = 0.0, h_sum = 0.0;
    for (auto r : task.rows) {
      g_sum += grad[r];
      h_sum += hess[r];
    }

    std::size_t best_feature = 0;
    double best_threshold = 0.0;
    double best_gain = 0.0;
    bool found = false;
    if (task.depth < max_depth && task.rows.size() >= 2) {
      std::vector<std::size_t> order = task.rows;
      for (std::size_t f = 0; f < x.cols(); ++f) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
        double gl = 0.0, hl = 0.0;
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
          gl += grad[order[i]];
          hl += hess[order[i]];
          const double lo = x(order[i], f), hi = x(order[i + 1], f);
          if (!(lo < hi)) continue;
          const double gr = g_sum - gl, hr = h_sum - hl;
          if (!(hl + lambda > 0.0) || !(hr + lambda > 0.0)) continue;
          const double gain = split_gain(gl, hl, gr, hr, lambda, gamma);
          if (gain > best_gain) {
            best_gain = gain;
            best_feature = f;
            best_threshold = lo + (hi - lo) / 2.0;
            found = true;
          }
        }
      }
    }

    if (!found) {
      tree.nodes[task.node].weight = leaf_weight(g_sum, h_sum, lambda);
      continue;
    }
    std::vector<std::size_t> left_rows, right_rows;
    for (auto r : task.rows) {
      (x(r, best_feature) <= best_threshold ? left_rows : right_rows).push_back(r);
    }
    const auto left_id = static_cast<std::uint32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    auto& node = tree.nodes[task.node];
    node.feature = static_cast<std::int32_t>(best_feature);
    node.threshold = best_threshold;
    node.left = left_id;
    node.right = left_id + 1;
    stack.push_back({left_id + 1, std::move(right_rows), task.depth + 1});
    stack.push_back({left_id, std::move(left_rows), task.depth + 1});
  }
  return tree;
}

// Training loss after every round (entry 0 is the loss of the base score).
struct BoostTrace {
  std::vector<double> train_loss;
};

inline double mean_loss(BoostLoss loss, std::span<const double> y, std::span<const double> margin) {
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (loss == BoostLoss::kLogistic) {
      total += logistic_loss(y[i], margin[i]);
    } else {
      const double r = y[i] - margin[i];
      total += 0.5 * r * r;
    }
  }
  return total / static_cast<double>(y.size());
}

/// Gradient boosting on real-valued targets (0/1 for the logistic loss).
inline BoostedModel fit_gbt(const Matrix& x, std::span<const double> targets,
                            const GbtParams& params, BoostTrace* trace = nullptr) {
  validate(params);
  const std::size_t n = x.rows();
  if (n == 0) fail(ErrorKind::kEmptyInput, "cannot boost on zero rows");
  if (targets.size() != n) fail(ErrorKind::kLengthMismatch, "X and y differ in length");

  BoostedModel model;
  model.num_features = x.cols();
  model.params = params;
  std::vector<double> margin(n, model.base_margin()), grad(n), hess(n);
  if (trace) trace->train_loss.push_back(mean_loss(params.loss, targets, margin));

  for (std::size_t round = 0; round < params.n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      if (params.loss == BoostLoss::kLogistic) {
        grad[i] = logistic_gradient(targets[i], margin[i]);
        hess[i] = logistic_hessian(margin[i]);
      } else {
        grad[i] = margin[i] - targets[i];
        hess[i] = 1.0;
      }
    }
    auto tree = grow_regression_tree(x, grad, hess, params.max_depth, params.lambda, params.gamma);
    for (std::size_t i = 0; i < n; ++i) margin[i] += params.learning_rate * tree.value(x.row(i));
    model.trees.push_back(std::move(tree));
    if (trace) trace->train_loss.push_back(mean_loss(params.loss, targets, margin));
  }
  return model;
}

inline BoostedModel fit_gbt(const Matrix& x, const Labels& y, const GbtParams& params,
                            BoostTrace* trace = nullptr) {
  require_binary(y);
  const std::vector<double> targets(y.begin(), y.end());
  return fit_gbt(x, std::span<const double>(targets), params, trace);
}

}  // namespace hfstack

#endif  // HFSTACK_BOOSTING_HPP_
