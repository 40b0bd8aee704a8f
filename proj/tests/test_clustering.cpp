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

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "hfstack/clustering.hpp"
#include "test_support.hpp"

namespace hfstack {
namespace {

Matrix two_blobs(Prng& prng, std::size_t per_blob, double separation) {
  Matrix x(2 * per_blob, 2);
  for (std::size_t i = 0; i < 2 * per_blob; ++i) {
    const double cx = i < per_blob ? 0.0 : separation;
    x(i, 0) = cx + prng.uniform() - 0.5;
    x(i, 1) = prng.uniform() - 0.5;
  }
  return x;
}

double recomputed_inertia(const Matrix& x, const KMeansModel& m) {
  double total = 0.0;
  const auto labels = kmeans_assign(m, x);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    total += detail::squared_distance(x.row(i), m.centroids.row(labels[i]));
  }
  return total;
}

TEST(KMeans, TwoSeparatedPairs) {
  const Matrix x{{0, 0}, {0, 1}, {10, 0}, {10, 1}};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto m = kmeans_fit(x, {2, seed, 300, 1e-5});
    std::vector<std::vector<double>> c{{m.centroids(0, 0), m.centroids(0, 1)},
                                       {m.centroids(1, 0), m.centroids(1, 1)}};
    std::sort(c.begin(), c.end());
    EXPECT_EQ(c[0], (std::vector<double>{0, 0.5}));
    EXPECT_EQ(c[1], (std::vector<double>{10, 0.5}));
    EXPECT_DOUBLE_EQ(m.inertia, 1.0);
  }
}

TEST(KMeans, SingleClusterIsColumnMeans) {
  const Matrix x{{1, 2}, {3, 6}, {5, 1}};
  const auto m = kmeans_fit(x, {1, 0, 300, 1e-5});
  EXPECT_DOUBLE_EQ(m.centroids(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(m.centroids(0, 1), 3.0);
  // Total variance times n: (4+0+4) + (1+9+4).
  EXPECT_NEAR(m.inertia, 22.0, 1e-12);
}

TEST(KMeans, KEqualsNHasZeroInertia) {
  const Matrix x{{1, 2}, {3, 6}, {5, 1}, {-2, 0}};
  const auto m = kmeans_fit(x, {4, 3, 300, 1e-5});
  EXPECT_EQ(m.inertia, 0.0);
}

TEST(KMeans, EmptyInputRejected) {
  try {
    kmeans_fit(Matrix(0, 2), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kEmptyInput);
  }
}

TEST(KMeansAssign, CentroidAndTieRules) {
  KMeansModel m;
  m.k = 2;
  m.centroids = Matrix{{0, 0}, {2, 0}};
  EXPECT_EQ(kmeans_assign(m, Matrix{{2, 0}}), (std::vector<std::size_t>{1}));
  EXPECT_EQ(kmeans_assign(m, Matrix{{1, 5}}), (std::vector<std::size_t>{0}));
  EXPECT_THROW(kmeans_assign(m, Matrix{{1, 2, 3}}), Error);
}

TEST(KMeansProperty, InertiaTraceNonIncreasingAndConsistent) {
  Prng prng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 5 + prng.below(80), d = 1 + prng.below(4);
    const std::size_t k = 1 + prng.below(std::min<std::size_t>(n, 6));
    Matrix x(n, d);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < d; ++c) x(r, c) = std::round(prng.uniform() * 8.0);
    }
    const auto m = kmeans_fit(x, {k, prng(), 300, 1e-5});
    for (std::size_t i = 1; i < m.inertia_trace.size(); ++i) {
      ASSERT_LE(m.inertia_trace[i], m.inertia_trace[i - 1] * (1 + 1e-12) + 1e-12);
    }
    EXPECT_NEAR(m.inertia, recomputed_inertia(x, m), 1e-6);
    EXPECT_EQ(m.labels, kmeans_assign(m, x));
  }
}

TEST(Fcm, SingleClusterHasFullMembership) {
  const Matrix x{{1, 2}, {3, 6}, {5, 1}};
  const auto m = fcm_fit(x, {1, 2.0, 300, 1e-5, 0});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(m.memberships(i, 0), 1.0);
}

TEST(Fcm, EquidistantPointSplitsEvenly) {
  FcmModel m;
  m.c = 2;
  m.m = 2.0;
  m.centroids = Matrix{{-1, 0}, {1, 0}};
  const auto u = fcm_memberships(m, Matrix{{0, 3}});
  EXPECT_DOUBLE_EQ(u(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(u(0, 1), 0.5);
}

TEST(Fcm, CoincidentPointTakesThatCentroid) {
  FcmModel m;
  m.c = 3;
  m.m = 2.0;
  m.centroids = Matrix{{-1, 0}, {1, 0}, {4, 4}};
  const auto u = fcm_memberships(m, Matrix{{1, 0}});
  EXPECT_EQ(u(0, 0), 0.0);
  EXPECT_EQ(u(0, 1), 1.0);
  EXPECT_EQ(u(0, 2), 0.0);
}

TEST(Fcm, MembershipFormulaMatchesClosedForm) {
  FcmModel m;
  m.c = 2;
  m.m = 3.0;
  m.centroids = Matrix{{0}, {4}};
  const auto u = fcm_memberships(m, Matrix{{1}});
  // d = (1, 3); u_0 = 1 / (1 + (1/3)^(2/(m-1))) = 1 / (1 + 1/3).
  EXPECT_NEAR(u(0, 0), 0.75, 1e-15);
  EXPECT_NEAR(u(0, 1), 0.25, 1e-15);
}

TEST(FcmProperty, RowsSumToOneAndObjectiveNonIncreasing) {
  Prng prng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 4 + prng.below(60), d = 1 + prng.below(3);
    const std::size_t c = 1 + prng.below(std::min<std::size_t>(n, 4));
    Matrix x(n, d);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t f = 0; f < d; ++f) x(r, f) = prng.uniform() * 10.0;
    }
    const double m = 1.2 + prng.uniform() * 2.0;
    std::size_t calls = 0;
    const auto model = fcm_fit(x, {c, m, 200, 1e-7, prng()},
                               [&](std::size_t, const Matrix& u, const Matrix&, double) {
                                 ++calls;
                                 for (std::size_t i = 0; i < u.rows(); ++i) {
                                   double s = 0.0;
                                   for (std::size_t l = 0; l < u.cols(); ++l) {
                                     ASSERT_GE(u(i, l), 0.0);
                                     ASSERT_LE(u(i, l), 1.0);
                                     s += u(i, l);
                                   }
                                   ASSERT_NEAR(s, 1.0, 1e-9);
                                 }
                               });
    EXPECT_EQ(calls, model.iterations);
    for (std::size_t i = 1; i < model.objective_trace.size(); ++i) {
      ASSERT_LE(model.objective_trace[i], model.objective_trace[i - 1] * (1 + 1e-10) + 1e-12);
    }
  }
}

TEST(FcmProperty, HardenedNearOneMatchesKMeans) {
  Prng prng(14);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = two_blobs(prng, 25, 20.0);
    const auto km = kmeans_fit(x, {2, prng(), 300, 1e-8});
    const auto fm = fcm_fit(x, {2, 1.05, 300, 1e-8, prng()});
    EXPECT_DOUBLE_EQ(cluster_accuracy(harden(fm.memberships), km.labels), 1.0);
  }
}

TEST(ClusterAccuracy, Examples) {
  const std::vector<int> truth{0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(cluster_accuracy(truth, truth), 1.0);
  EXPECT_DOUBLE_EQ(cluster_accuracy(std::vector<int>{1, 1, 0, 0}, truth), 1.0);
  EXPECT_DOUBLE_EQ(cluster_accuracy(std::vector<int>{0, 1, 0, 1}, truth), 0.5);
  EXPECT_THROW(cluster_accuracy(std::vector<int>{0}, truth), Error);
}

TEST(ClusterAccuracyProperty, InvariantUnderRelabeling) {
  Prng prng(15);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + prng.below(40), k = 1 + prng.below(4);
    std::vector<std::size_t> pred(n);
    std::vector<int> truth(n);
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] = prng.below(k);
      truth[i] = static_cast<int>(prng.below(2));
    }
    const auto relabel = prng.permutation(k);
    std::vector<std::size_t> renamed(n);
    for (std::size_t i = 0; i < n; ++i) renamed[i] = relabel[pred[i]];
    ASSERT_DOUBLE_EQ(cluster_accuracy(pred, truth), cluster_accuracy(renamed, truth));
  }
}

}  // namespace
}  // namespace hfstack
