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

#ifndef HFSTACK_DATASET_HPP_
#define HFSTACK_DATASET_HPP_

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "hfstack/error.hpp"
#include "hfstack/matrix.hpp"

namespace hfstack {

enum class ColumnKind { kContinuous, kBinary };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::kContinuous;
  std::string unit;

  friend bool operator==(const ColumnSpec&, const ColumnSpec&) = default;
};

struct FeatureSchema {
  std::vector<ColumnSpec> columns;
  std::string target_name;

  std::size_t size() const noexcept { return columns.size(); }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i].name == name) return i;
    }
    return std::nullopt;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    out.reserve(columns.size());
    for (const auto& c : columns) out.push_back(c.name);
    return out;
  }

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;
};

// The twelve clinical features of the UCI heart-failure records plus the
// DEATH_EVENT target (1 = passed away, 0 = survived).
inline FeatureSchema heart_failure_schema() {
  using K = ColumnKind;
  return FeatureSchema{
      {
          {"age", K::kContinuous, "years"},
          {"anaemia", K::kBinary, ""},
          {"creatinine_phosphokinase", K::kContinuous, "mcg/L"},
          {"diabetes", K::kBinary, ""},
          {"ejection_fraction", K::kContinuous, "%"},
          {"high_blood_pressure", K::kBinary, ""},
          {"platelets", K::kContinuous, "kiloplatelets/mL"},
          {"serum_creatinine", K::kContinuous, "mg/dL"},
          {"serum_sodium", K::kContinuous, "mEq/L"},
          {"sex", K::kBinary, ""},
          {"smoking", K::kBinary, ""},
          {"time", K::kContinuous, "days"},
      },
      "DEATH_EVENT"};
}

struct Dataset {
  FeatureSchema schema;
  Matrix rows;
  Labels labels;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t num_features() const noexcept { return schema.size(); }

  Dataset subset(std::span<const std::size_t> indices) const {
    return Dataset{schema, rows.select_rows(indices), select_labels(labels, indices)};
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Throws if the dataset breaks a structural invariant.
inline void validate(const Dataset& ds) {
  if (ds.rows.rows() != ds.labels.size()) {
    fail(ErrorKind::kLengthMismatch, "rows and labels differ in length");
  }
  if (ds.rows.rows() > 0 && ds.rows.cols() != ds.schema.size()) {
    fail(ErrorKind::kDimensionMismatch, "row width does not match schema");
  }
  require_binary(ds.labels);
  for (std::size_t r = 0; r < ds.rows.rows(); ++r) {
    for (std::size_t c = 0; c < ds.schema.size(); ++c) {
      const double v = ds.rows(r, c);
      if (!std::isfinite(v)) {
        fail(ErrorKind::kNonNumericCell,
             "non-finite value in column " + ds.schema.columns[c].name);
      }
      if (ds.schema.columns[c].kind == ColumnKind::kBinary && v != 0.0 && v != 1.0) {
        fail(ErrorKind::kInvalidArgument, "binary column " + ds.schema.columns[c].name +
                                              " holds " + std::to_string(v));
      }
    }
  }
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

inline double parse_cell(std::string_view cell, std::size_t line_no, const std::string& column) {
  const std::string where = "line " + std::to_string(line_no) + ", column " + column;
  if (cell.empty()) fail(ErrorKind::kMissingValue, "empty cell at " + where);
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
    fail(ErrorKind::kNonNumericCell, "'" + std::string(cell) + "' at " + where);
  }
  return value;
}

}  // namespace detail

// Reads a comma-separated file with a header row. Columns may appear in any
// order; the result is always in schema order. Quoting is not supported.
inline Dataset load_csv(std::istream& in, const FeatureSchema& schema) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::kEmptyDataset, "missing header row");
  if (line.find('"') != std::string::npos) {
    fail(ErrorKind::kMalformedCsv, "quoted fields are not supported");
  }
  const auto header = detail::split_commas(line);

  // file column -> schema column (or the target when == schema.size()).
  const std::size_t target_slot = schema.size();
  std::vector<std::size_t> slot_of(header.size(), SIZE_MAX);
  std::vector<bool> seen(schema.size() + 1, false);
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::size_t slot = SIZE_MAX;
    if (header[i] == schema.target_name) {
      slot = target_slot;
    } else if (auto idx = schema.index_of(header[i])) {
      slot = *idx;
    } else {
      fail(ErrorKind::kMalformedCsv, "unexpected column '" + std::string(header[i]) + "'");
    }
    if (seen[slot]) fail(ErrorKind::kMalformedCsv, "duplicate column '" + std::string(header[i]) + "'");
    seen[slot] = true;
    slot_of[i] = slot;
  }
  for (std::size_t s = 0; s < schema.size(); ++s) {
    if (!seen[s]) fail(ErrorKind::kMissingColumn, "header lacks '" + schema.columns[s].name + "'");
  }
  if (!seen[target_slot]) fail(ErrorKind::kMissingColumn, "header lacks '" + schema.target_name + "'");

  Dataset ds{schema, Matrix(0, schema.size()), {}};
  std::vector<double> values(schema.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    if (line.find('"') != std::string::npos) {
      fail(ErrorKind::kMalformedCsv, "quoted field on line " + std::to_string(line_no));
    }
    const auto cells = detail::split_commas(line);
    if (cells.size() != header.size()) {
      fail(ErrorKind::kMalformedCsv, "line " + std::to_string(line_no) + " has " +
                                         std::to_string(cells.size()) + " cells, expected " +
                                         std::to_string(header.size()));
    }
    Label label = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::size_t slot = slot_of[i];
      const std::string& name =
          slot == target_slot ? schema.target_name : schema.columns[slot].name;
      const double v = detail::parse_cell(cells[i], line_no, name);
      if (slot == target_slot) {
        if (v != 0.0 && v != 1.0) {
          fail(ErrorKind::kNonNumericCell, "target must be 0 or 1 on line " + std::to_string(line_no));
        }
        label = static_cast<Label>(v);
      } else {
        values[slot] = v;
      }
    }
    ds.rows.append_row(values);
    ds.labels.push_back(label);
  }
  if (ds.labels.empty()) fail(ErrorKind::kEmptyDataset, "header present but no data rows");
  validate(ds);
  return ds;
}

inline Dataset load_csv(const std::string& path, const FeatureSchema& schema) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path + "'");
  return load_csv(in, schema);
}

inline const std::vector<std::string>& default_rounded_columns() {
  static const std::vector<std::string> cols{"age", "platelets"};
  return cols;
}

// Rounds the named columns half away from zero (std::round); everything else
// passes through unchanged. Columns absent from the schema are ignored.
inline Dataset clean(const Dataset& ds,
                     const std::vector<std::string>& rounded = default_rounded_columns()) {
  Dataset out = ds;
  for (const auto& name : rounded) {
    const auto idx = out.schema.index_of(name);
    if (!idx) continue;
    for (std::size_t r = 0; r < out.rows.rows(); ++r) {
      out.rows(r, *idx) = std::round(out.rows(r, *idx));
    }
  }
  return out;
}

inline std::map<Label, std::size_t> class_counts(const Labels& labels) {
  std::map<Label, std::size_t> counts;
  for (auto y : labels) ++counts[y];
  return counts;
}

inline std::map<Label, std::size_t> class_counts(const Dataset& ds) {
  return class_counts(ds.labels);
}

struct CorrelationMatrix {
  std::vector<std::string> labels;
  Matrix values;
};

// Pearson product-moment correlation. Returns nullopt for a constant input.
inline std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorKind::kLengthMismatch, "pearson inputs differ in length");
  if (a.empty()) fail(ErrorKind::kEmptyInput, "pearson of empty vectors");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  const double r = sab / std::sqrt(saa * sbb);
  return std::clamp(r, -1.0, 1.0);
}

// Correlations among all features with the target appended as the last column.
inline CorrelationMatrix pearson_matrix(const Dataset& ds) {
  const std::size_t d = ds.num_features();
  std::vector<std::vector<double>> cols;
  cols.reserve(d + 1);
  CorrelationMatrix cm;
  for (std::size_t c = 0; c < d; ++c) {
    cols.push_back(ds.rows.column(c));
    cm.labels.push_back(ds.schema.columns[c].name);
  }
  cols.emplace_back(ds.labels.begin(), ds.labels.end());
  cm.labels.push_back(ds.schema.target_name);

  for (std::size_t c = 0; c <= d; ++c) {
    if (!pearson(cols[c], cols[c])) {
      fail(ErrorKind::kConstantColumn, "column '" + cm.labels[c] + "' is constant");
    }
  }
  cm.values = Matrix(d + 1, d + 1);
  for (std::size_t i = 0; i <= d; ++i) {
    cm.values(i, i) = 1.0;
    for (std::size_t j = i + 1; j <= d; ++j) {
      const double r = *pearson(cols[i], cols[j]);
      cm.values(i, j) = r;
      cm.values(j, i) = r;
    }
  }
  return cm;
}

inline void write_correlation_csv(std::ostream& out, const CorrelationMatrix& cm) {
  for (const auto& name : cm.labels) out << ',' << name;
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < cm.labels.size(); ++i) {
    out << cm.labels[i];
    for (std::size_t j = 0; j < cm.labels.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.6f", cm.values(i, j));
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace hfstack

#endif  // HFSTACK_DATASET_HPP_
