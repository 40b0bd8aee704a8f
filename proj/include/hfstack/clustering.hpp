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

#ifndef HFSTACK_CLUSTERING_HPP_
#define HFSTACK_CLUSTERING_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "hfstack/error.hpp"
#include "hfstack/matrix.hpp"
#include "hfstack/preprocess.hpp"
#include "hfstack/random.hpp"

namespace hfstack {

// ---------------------------------------------------------------------------
// K-Means (Lloyd iterations, k-means++ seeding)
// ---------------------------------------------------------------------------

struct KMeansParams {
  std::size_t k = 2;
  std::uint64_t seed = 0;
  std::size_t max_iter = 300;
  double tol = 1e-5;
};

struct KMeansModel {
  std::size_t k = 0;
  Matrix centroids;
  double inertia = 0.0;
  std::size_t iterations = 0;
  std::vector<double> inertia_trace;  // inertia after every assignment step
  std::vector<std::size_t> labels;    // assignments of the fitting rows
};

namespace detail {

inline std::size_t nearest_centroid(std::span<const double> x, const Matrix& centroids,
                                    double* best_dist = nullptr) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < centroids.rows(); ++j) {
    const double d = squared_distance(x, centroids.row(j));
    if (d < best_d) {  // strict: ties keep the lowest index
      best_d = d;
      best = j;
    }
  }
  if (best_dist) *best_dist = best_d;
  return best;
}

inline double assign_all(const Matrix& x, const Matrix& centroids,
                         std::vector<std::size_t>& labels, std::vector<double>& dist) {
  double inertia = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    labels[i] = nearest_centroid(x.row(i), centroids, &dist[i]);
    inertia += dist[i];
  }
  return inertia;
}

inline Matrix kmeans_plus_plus(const Matrix& x, std::size_t k, Prng& prng) {
  const std::size_t n = x.rows();
  Matrix centroids(0, x.cols());
  centroids.append_row(x.row(static_cast<std::size_t>(prng.below(n))));
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  while (centroids.rows() < k) {
    const auto last = centroids.row(centroids.rows() - 1);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(x.row(i), last));
      total += d2[i];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = prng.uniform() * total;
      double acc = 0.0;
      std::size_t last_positive = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        last_positive = i;
        acc += d2[i];
        if (acc > target) {
          pick = i;
          break;
        }
      }
      if (pick == n) pick = last_positive;  // rounding left acc just short
    } else {
      pick = static_cast<std::size_t>(prng.below(n));
    }
    centroids.append_row(x.row(pick));
  }
  return centroids;
}

}  // namespace detail

inline KMeansModel kmeans_fit(const Matrix& x, const KMeansParams& params) {
  const std::size_t n = x.rows(), d = x.cols(), k = params.k;
  if (n == 0) fail(ErrorKind::kEmptyInput, "k-means on zero rows");
  if (k < 1 || k > n) {
    fail(ErrorKind::kInvalidArgument, "k must lie in [1, n]; got k=" + std::to_string(k));
  }
  Prng prng(params.seed);
  KMeansModel model;
  model.k = k;
  model.centroids = detail::kmeans_plus_plus(x, k, prng);
  model.labels.assign(n, 0);
  std::vector<double> dist(n);

  for (std::size_t iter = 0; iter < params.max_iter; ++iter) {
    model.inertia_trace.push_back(detail::assign_all(x, model.centroids, model.labels, dist));
    model.iterations = iter + 1;

    Matrix next(k, d);
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto j = model.labels[i];
      ++sizes[j];
      for (std::size_t c = 0; c < d; ++c) next(j, c) += x(i, c);
    }
    std::vector<bool> taken(n, false);
    for (std::size_t j = 0; j < k; ++j) {
      if (sizes[j] > 0) {
        for (std::size_t c = 0; c < d; ++c) next(j, c) /= static_cast<double>(sizes[j]);
        continue;
      }
      // Empty cluster: move it onto the point worst served by its centroid.
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!taken[i] && dist[i] > far_d) {
          far_d = dist[i];
          far = i;
        }
      }
      taken[far] = true;
      const auto src = x.row(far);
      std::copy(src.begin(), src.end(), next.row(j).begin());
    }

    double shift = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      shift = std::max(shift, std::sqrt(detail::squared_distance(next.row(j), model.centroids.row(j))));
    }
    model.centroids = std::move(next);
    if (shift < params.tol) break;
  }
  model.inertia = detail::assign_all(x, model.centroids, model.labels, dist);
  model.inertia_trace.push_back(model.inertia);
  return model;
}

inline std::vector<std::size_t> kmeans_assign(const KMeansModel& model, const Matrix& x) {
  if (x.rows() > 0 && x.cols() != model.centroids.cols()) {
    fail(ErrorKind::kDimensionMismatch, "k-means query width differs from centroids");
  }
  std::vector<std::size_t> labels(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    labels[i] = detail::nearest_centroid(x.row(i), model.centroids);
  }
  return labels;
}

// ---------------------------------------------------------------------------
// Fuzzy C-Means
// ---------------------------------------------------------------------------

struct FcmParams {
  std::size_t c = 2;
  double m = 2.0;
  std::size_t max_iter = 300;
  double tol = 1e-5;
  std::uint64_t seed = 0;
};

struct FcmModel {
  std::size_t c = 0;
  double m = 2.0;
  Matrix centroids;
  Matrix memberships;  // n x c, rows sum to 1
  double objective = 0.0;
  std::size_t iterations = 0;
  std::vector<double> objective_trace;
};

namespace detail {

// Memberships of one point given squared distances to every centroid.
// A point sitting on one or more centroids is shared equally among them.
inline void fcm_membership_row(std::span<const double> d2, double m, std::span<double> out) {
  const std::size_t c = d2.size();
  std::size_t zeros = 0;
  for (auto v : d2) zeros += v == 0.0;
  if (zeros > 0) {
    for (std::size_t j = 0; j < c; ++j) out[j] = d2[j] == 0.0 ? 1.0 / static_cast<double>(zeros) : 0.0;
    return;
  }
  // u_j = 1 / sum_l (d_j / d_l)^(2/(m-1)), computed from ratios to the
  // nearest centroid.
  const double expo = 1.0 / (m - 1.0);  // applied to squared distances
  const double dmin = *std::min_element(d2.begin(), d2.end());
  double total = 0.0;
  for (std::size_t j = 0; j < c; ++j) {
    out[j] = std::pow(dmin / d2[j], expo);
    total += out[j];
  }
  for (std::size_t j = 0; j < c; ++j) out[j] /= total;
}

inline double fcm_objective(const Matrix& x, const Matrix& u, const Matrix& v, double m) {
  double j = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t l = 0; l < v.rows(); ++l) {
      j += std::pow(u(i, l), m) * squared_distance(x.row(i), v.row(l));
    }
  }
  return j;
}

inline Matrix fcm_centroids(const Matrix& x, const Matrix& u, double m) {
  const std::size_t n = x.rows(), d = x.cols(), c = u.cols();
  Matrix v(c, d);
  for (std::size_t l = 0; l < c; ++l) {
    double wsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = std::pow(u(i, l), m);
      wsum += w;
      for (std::size_t f = 0; f < d; ++f) v(l, f) += w * x(i, f);
    }
    if (wsum > 0.0) {
      for (std::size_t f = 0; f < d; ++f) v(l, f) /= wsum;
    }
  }
  return v;
}

}  // namespace detail

// Called once per iteration with (iteration, memberships, centroids, objective).
using FcmObserver = std::function<void(std::size_t, const Matrix&, const Matrix&, double)>;

inline FcmModel fcm_fit(const Matrix& x, const FcmParams& params, const FcmObserver& observer = {}) {
  const std::size_t n = x.rows(), c = params.c;
  if (n == 0) fail(ErrorKind::kEmptyInput, "fuzzy c-means on zero rows");
  if (c < 1 || c > n) fail(ErrorKind::kInvalidArgument, "c must lie in [1, n]");
  if (!(params.m > 1.0)) fail(ErrorKind::kInvalidArgument, "fuzzifier m must exceed 1");

  Prng prng(params.seed);
  FcmModel model;
  model.c = c;
  model.m = params.m;
  model.memberships = Matrix(n, c);
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0;
    for (std::size_t l = 0; l < c; ++l) {
      // Strictly positive so every row normalizes.
      model.memberships(i, l) = prng.uniform() + 1e-12;
      total += model.memberships(i, l);
    }
    for (std::size_t l = 0; l < c; ++l) model.memberships(i, l) /= total;
  }

  std::vector<double> d2(c);
  for (std::size_t iter = 0; iter < params.max_iter; ++iter) {
    model.centroids = detail::fcm_centroids(x, model.memberships, params.m);
    Matrix next(n, c);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t l = 0; l < c; ++l) {
        d2[l] = detail::squared_distance(x.row(i), model.centroids.row(l));
      }
      detail::fcm_membership_row(d2, params.m, next.row(i));
      for (std::size_t l = 0; l < c; ++l) {
        change = std::max(change, std::abs(next(i, l) - model.memberships(i, l)));
      }
    }
    model.memberships = std::move(next);
    model.objective = detail::fcm_objective(x, model.memberships, model.centroids, params.m);
    model.objective_trace.push_back(model.objective);
    model.iterations = iter + 1;
    if (observer) observer(iter, model.memberships, model.centroids, model.objective);
    if (change < params.tol) break;
  }
  return model;
}

inline Matrix fcm_memberships(const FcmModel& model, const Matrix& x) {
  if (x.rows() > 0 && x.cols() != model.centroids.cols()) {
    fail(ErrorKind::kDimensionMismatch, "FCM query width differs from centroids");
  }
  Matrix u(x.rows(), model.c);
  std::vector<double> d2(model.c);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t l = 0; l < model.c; ++l) {
      d2[l] = detail::squared_distance(x.row(i), model.centroids.row(l));
    }
    detail::fcm_membership_row(d2, model.m, u.row(i));
  }
  return u;
}

// Hard labels: highest membership, ties to the lowest cluster index.
inline std::vector<std::size_t> harden(const Matrix& memberships) {
  std::vector<std::size_t> labels(memberships.rows());
  for (std::size_t i = 0; i < memberships.rows(); ++i) {
    const auto r = memberships.row(i);
    labels[i] = static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
  }
  return labels;
}

// ---------------------------------------------------------------------------
// Cluster accuracy under the best relabeling
// ---------------------------------------------------------------------------

template <class P, class T>
double cluster_accuracy(const std::vector<P>& pred, const std::vector<T>& truth) {
  if (pred.size() != truth.size()) fail(ErrorKind::kLengthMismatch, "pred and truth differ in length");
  if (pred.empty()) fail(ErrorKind::kEmptyInput, "cluster accuracy of nothing");

  std::set<long long> distinct;
  for (auto p : pred) distinct.insert(static_cast<long long>(p));
  for (auto t : truth) distinct.insert(static_cast<long long>(t));
  if (distinct.size() > 8) {
    fail(ErrorKind::kInvalidArgument, "permutation search supports at most 8 labels");
  }
  const std::vector<long long> alphabet(distinct.begin(), distinct.end());
  const std::size_t a = alphabet.size();
  auto index_of = [&](long long v) {
    return static_cast<std::size_t>(std::lower_bound(alphabet.begin(), alphabet.end(), v) -
                                    alphabet.begin());
  };
  // Contingency table: agreement[p][t] = rows with pred p and truth t.
  std::vector<std::size_t> agreement(a * a, 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ++agreement[index_of(static_cast<long long>(pred[i])) * a +
                index_of(static_cast<long long>(truth[i]))];
  }
  std::vector<std::size_t> perm(a);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (std::size_t p = 0; p < a; ++p) hits += agreement[p * a + perm[p]];
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(pred.size());
}

}  // namespace hfstack

#endif  // HFSTACK_CLUSTERING_HPP_
