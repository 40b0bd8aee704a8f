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

#ifndef HFSTACK_PREPROCESS_HPP_
#define HFSTACK_PREPROCESS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "hfstack/dataset.hpp"
#include "hfstack/error.hpp"
#include "hfstack/matrix.hpp"
#include "hfstack/random.hpp"

namespace hfstack {

// ---------------------------------------------------------------------------
// Standard scaling
// ---------------------------------------------------------------------------

struct ScalerParams {
  std::vector<std::size_t> columns;
  std::vector<double> means;
  std::vector<double> stds;  // population convention (divide by n), all > 0
};

inline std::vector<std::size_t> all_columns(std::size_t d) {
  std::vector<std::size_t> cols(d);
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  return cols;
}

inline ScalerParams fit_scaler(const Matrix& x, const std::vector<std::size_t>& columns,
                               const std::vector<std::string>& names = {}) {
  if (x.rows() == 0) fail(ErrorKind::kEmptyInput, "cannot fit a scaler on zero rows");
  ScalerParams p;
  p.columns = columns;
  const double n = static_cast<double>(x.rows());
  for (auto c : columns) {
    if (c >= x.cols()) fail(ErrorKind::kDimensionMismatch, "scaler column out of range");
    double mean = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) mean += x(r, c);
    mean /= n;
    double var = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const double d = x(r, c) - mean;
      var += d * d;
    }
    const double sd = std::sqrt(var / n);
    if (!(sd > 0.0)) {
      const std::string label = c < names.size() ? names[c] : "#" + std::to_string(c);
      fail(ErrorKind::kConstantColumn, "column " + label + " is constant");
    }
    p.means.push_back(mean);
    p.stds.push_back(sd);
  }
  return p;
}

inline ScalerParams fit_scaler(const Dataset& ds, const std::vector<std::size_t>& columns) {
  return fit_scaler(ds.rows, columns, ds.schema.names());
}

inline Matrix apply_scaler(const Matrix& x, const ScalerParams& p) {
  if (p.means.size() != p.columns.size() || p.stds.size() != p.columns.size()) {
    fail(ErrorKind::kDimensionMismatch, "inconsistent scaler parameters");
  }
  Matrix out = x;
  for (std::size_t k = 0; k < p.columns.size(); ++k) {
    const auto c = p.columns[k];
    if (c >= x.cols()) fail(ErrorKind::kDimensionMismatch, "scaler column out of range");
    for (std::size_t r = 0; r < x.rows(); ++r) {
      out(r, c) = (x(r, c) - p.means[k]) / p.stds[k];
    }
  }
  return out;
}

inline Dataset apply_scaler(const Dataset& ds, const ScalerParams& p) {
  return Dataset{ds.schema, apply_scaler(ds.rows, p), ds.labels};
}

// ---------------------------------------------------------------------------
// Train/test split
// ---------------------------------------------------------------------------

struct SplitResult {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_indices;  // ascending row indices of the input
  std::vector<std::size_t> test_indices;
  std::uint64_t seed = 0;
  double ratio = 0.0;
};

// floor(ratio * n) with a 1e-9 allowance (0.29 * 100 counts as 29).
inline std::size_t test_count(double ratio, std::size_t n) {
  return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
}

inline SplitResult train_test_split(const Dataset& ds, double ratio, std::uint64_t seed,
                                    bool stratified = false) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    fail(ErrorKind::kInvalidArgument, "split ratio must lie in (0, 1)");
  }
  const std::size_t n = ds.size();
  if (n < 2) fail(ErrorKind::kEmptyInput, "need at least two rows to split");

  Prng prng(seed);
  std::vector<bool> in_test(n, false);
  if (stratified) {
    for (Label cls : {0, 1}) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < n; ++i) {
        if (ds.labels[i] == cls) members.push_back(i);
      }
      if (members.empty()) {
        fail(ErrorKind::kEmptyClass, "class " + std::to_string(cls) + " has no rows");
      }
      prng.shuffle(members);
      const std::size_t k = test_count(ratio, members.size());
      for (std::size_t i = 0; i < k; ++i) in_test[members[i]] = true;
    }
  } else {
    const auto perm = prng.permutation(n);
    const std::size_t k = test_count(ratio, n);
    for (std::size_t i = 0; i < k; ++i) in_test[perm[i]] = true;
  }

  SplitResult out;
  out.seed = seed;
  out.ratio = ratio;
  for (std::size_t i = 0; i < n; ++i) {
    (in_test[i] ? out.test_indices : out.train_indices).push_back(i);
  }
  out.train = ds.subset(out.train_indices);
  out.test = ds.subset(out.test_indices);
  return out;
}

// ---------------------------------------------------------------------------
// SMOTE
// ---------------------------------------------------------------------------

struct SmoteConfig {
  std::size_t k_neighbors = 5;
  std::uint64_t seed = 0;
  double target_ratio = 1.0;  // minority / majority after resampling
};

namespace detail {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// k nearest rows (excluding the row itself) for every row of `pts`, ordered
// by distance with ties going to the lower index.
inline std::vector<std::vector<std::size_t>> nearest_neighbors(const Matrix& pts, std::size_t k) {
  const std::size_t m = pts.rows();
  std::vector<std::vector<std::size_t>> out(m);
  std::vector<std::pair<double, std::size_t>> cand;
  for (std::size_t i = 0; i < m; ++i) {
    cand.clear();
    for (std::size_t j = 0; j < m; ++j) {
      if (j != i) cand.emplace_back(squared_distance(pts.row(i), pts.row(j)), j);
    }
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
    for (std::size_t t = 0; t < k; ++t) out[i].push_back(cand[t].second);
  }
  return out;
}

}  // namespace detail

/// Synthetic Minority Oversampling.
///
/// Appends interpolated minority rows until the minority class reaches
/// round(target_ratio * majority). Each synthetic row is x + u * (nn - x),
/// where x is a uniformly drawn minority row, nn one of its k nearest minority
/// neighbours (Euclidean, raw features) and u ~ U[0, 1]. Binary columns are
/// copied from x. The input rows come first and are left untouched.
inline Dataset smote(const Dataset& ds, const SmoteConfig& cfg) {
  const auto counts = class_counts(ds);
  if (counts.size() < 2) fail(ErrorKind::kSingleClass, "SMOTE needs two classes");
  const std::size_t c0 = counts.at(0), c1 = counts.at(1);
  const Label minority = c1 < c0 ? 1 : 0;
  const std::size_t n_min = std::min(c0, c1), n_maj = std::max(c0, c1);
  if (cfg.k_neighbors < 1 || cfg.k_neighbors >= n_min) {
    fail(ErrorKind::kKTooLarge, "k_neighbors=" + std::to_string(cfg.k_neighbors) +
                                    " must be in [1, minority count " + std::to_string(n_min) +
                                    ")");
  }
  if (!(cfg.target_ratio > 0.0)) fail(ErrorKind::kInvalidArgument, "target_ratio must be > 0");

  const auto target =
      static_cast<std::size_t>(std::llround(cfg.target_ratio * static_cast<double>(n_maj)));
  Dataset out = ds;
  if (target <= n_min) return out;
  const std::size_t needed = target - n_min;

  std::vector<std::size_t> minority_rows;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.labels[i] == minority) minority_rows.push_back(i);
  }
  const Matrix pts = ds.rows.select_rows(minority_rows);
  const auto neighbors = detail::nearest_neighbors(pts, cfg.k_neighbors);

  Prng prng(cfg.seed);
  const std::size_t d = ds.num_features();
  std::vector<double> synth(d);
  for (std::size_t s = 0; s < needed; ++s) {
    const auto i = static_cast<std::size_t>(prng.below(pts.rows()));
    const auto j = neighbors[i][static_cast<std::size_t>(prng.below(cfg.k_neighbors))];
    const double u = prng.uniform_closed();
    const auto x = pts.row(i);
    const auto nn = pts.row(j);
    for (std::size_t c = 0; c < d; ++c) {
      if (ds.schema.columns[c].kind == ColumnKind::kBinary) {
        synth[c] = std::clamp(std::round(x[c]), 0.0, 1.0);
      } else {
        synth[c] = x[c] + u * (nn[c] - x[c]);
      }
    }
    out.rows.append_row(synth);
    out.labels.push_back(minority);
  }
  return out;
}

}  // namespace hfstack

#endif  // HFSTACK_PREPROCESS_HPP_
