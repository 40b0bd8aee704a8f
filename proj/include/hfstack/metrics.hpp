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

#ifndef HFSTACK_METRICS_HPP_
#define HFSTACK_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <vector>

#include "hfstack/error.hpp"
#include "hfstack/matrix.hpp"

namespace hfstack {

// Positive class is 1 (passed away).
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const noexcept { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

inline ConfusionMatrix confusion(std::span<const Label> y_true, std::span<const Label> y_pred) {
  if (y_true.size() != y_pred.size()) fail(ErrorKind::kLengthMismatch, "label vectors differ in length");
  if (y_true.empty()) fail(ErrorKind::kEmptyInput, "confusion matrix of nothing");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const Label t = y_true[i], p = y_pred[i];
    if ((t != 0 && t != 1) || (p != 0 && p != 1)) {
      fail(ErrorKind::kInvalidArgument, "labels must be 0 or 1");
    }
    if (t == 1) {
      ++(p == 1 ? cm.tp : cm.fn);
    } else {
      ++(p == 1 ? cm.fp : cm.tn);
    }
  }
  return cm;
}

struct MetricsReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

namespace detail {

// 0/0 is reported as 0.
inline double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

inline double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

}  // namespace detail

// Accuracy plus precision/recall/F1 of the positive class. Recall is
// TP / (TP + FN), the share of actual positives that were found.
inline MetricsReport classification_metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) fail(ErrorKind::kEmptyInput, "metrics of an empty confusion matrix");
  MetricsReport r;
  r.support = cm.total();
  r.accuracy = detail::ratio(cm.tp + cm.tn, cm.total());
  r.precision = detail::ratio(cm.tp, cm.tp + cm.fp);
  r.recall = detail::ratio(cm.tp, cm.tp + cm.fn);
  r.f1 = detail::harmonic(r.precision, r.recall);
  return r;
}

// Unweighted mean over both classes of precision, recall and F1.
inline MetricsReport macro_metrics(const ConfusionMatrix& cm) {
  const MetricsReport pos = classification_metrics(cm);
  const MetricsReport neg = classification_metrics(ConfusionMatrix{cm.tn, cm.fn, cm.fp, cm.tp});
  MetricsReport r;
  r.support = cm.total();
  r.accuracy = pos.accuracy;
  r.precision = (pos.precision + neg.precision) / 2.0;
  r.recall = (pos.recall + neg.recall) / 2.0;
  r.f1 = (pos.f1 + neg.f1) / 2.0;
  return r;
}

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct RocCurve {
  std::vector<RocPoint> points;   // (0,0) first, (1,1) last
  std::vector<double> thresholds; // parallel to points; +inf for the origin
};

// One operating point per distinct score: predicting positive for
// score >= threshold, thresholds descending.
inline RocCurve roc_curve(std::span<const Label> y_true, std::span<const double> scores) {
  if (y_true.size() != scores.size()) fail(ErrorKind::kLengthMismatch, "labels and scores differ in length");
  std::size_t positives = 0;
  for (auto y : y_true) {
    if (y != 0 && y != 1) fail(ErrorKind::kInvalidArgument, "labels must be 0 or 1");
    positives += y == 1;
  }
  const std::size_t negatives = y_true.size() - positives;
  if (positives == 0 || negatives == 0) fail(ErrorKind::kSingleClass, "ROC needs both classes");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  curve.thresholds.push_back(std::numeric_limits<double>::infinity());
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == s; ++i) {
      ++(y_true[order[i]] == 1 ? tp : fp);
    }
    curve.points.push_back({detail::ratio(fp, negatives), detail::ratio(tp, positives)});
    curve.thresholds.push_back(s);
  }
  return curve;
}

// Trapezoidal area under the curve.
inline double auc(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  return area;
}

inline void write_roc_csv(std::ostream& out, const RocCurve& curve) {
  out << "threshold,fpr,tpr\n";
  char buf[96];
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    if (std::isinf(curve.thresholds[i])) {
      std::snprintf(buf, sizeof buf, "inf,%.10g,%.10g\n", curve.points[i].fpr, curve.points[i].tpr);
    } else {
      std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g\n", curve.thresholds[i],
                    curve.points[i].fpr, curve.points[i].tpr);
    }
    out << buf;
  }
}

}  // namespace hfstack

#endif  // HFSTACK_METRICS_HPP_
