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

#ifndef HFSTACK_SERIALIZE_HPP_
#define HFSTACK_SERIALIZE_HPP_

// Model files are whitespace-separated text:
//
//   HFSTACK-MODEL <version>
//   name <identifier>
//   scaler none | scaler <k> <col>... <mean>... <std>...
//   <model>
//   end
//
// where <model> is one of
//
//   dtree <num_features> <num_nodes> { <feature> <threshold> <left> <right> <n0> <n1> }
//   forest <num_features> <oob_error|none> <n_trees> { <dtree> oob <m> <row>... }
//   gbt <num_features> <loss> <n_rounds> <learning_rate> <lambda> <gamma> <max_depth>
//       <base_score> <n_trees> { <num_nodes> { <feature> <threshold> <left> <right> <weight> } }
//   constant <num_features> <score>
//   stack <scores|labels> <n_bases> { <model> } <forest>
//
// Reals are written as C99 hexadecimal floats so a round trip is exact.
// Readers reject any version other than their own.

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "hfstack/boosting.hpp"
#include "hfstack/decision_tree.hpp"
#include "hfstack/error.hpp"
#include "hfstack/forest.hpp"
#include "hfstack/preprocess.hpp"
#include "hfstack/stacking.hpp"

namespace hfstack {

inline constexpr const char* kModelMagic = "HFSTACK-MODEL";
inline constexpr int kModelFormatVersion = 1;

using SavedModel = std::variant<DecisionTree, ForestModel, BoostedModel, ConstantModel, StackedModel>;

struct ModelFile {
  std::string name;
  std::optional<ScalerParams> scaler;  // applied to raw features before predicting
  SavedModel model;
};

inline Prediction predict(const SavedModel& model, std::span<const double> x) {
  return std::visit([&](const auto& m) { return m.predict(x); }, model);
}

inline SavedModel to_saved(Model m) {
  return std::visit([](auto&& v) -> SavedModel { return std::move(v); }, std::move(m));
}

namespace detail {

inline std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

class TokenWriter {
 public:
  explicit TokenWriter(std::ostream& out) : out_(out) {}
  TokenWriter& word(const std::string& w) {
    out_ << w << ' ';
    return *this;
  }
  TokenWriter& num(std::uint64_t v) { return word(std::to_string(v)); }
  TokenWriter& inum(std::int64_t v) { return word(std::to_string(v)); }
  TokenWriter& real(double v) { return word(hex(v)); }
  void newline() { out_ << '\n'; }

 private:
  std::ostream& out_;
};

class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) fail(ErrorKind::kModelFormat, "unexpected end of model file");
    return w;
  }
  void expect(const std::string& w) {
    const auto got = word();
    if (got != w) fail(ErrorKind::kModelFormat, "expected '" + w + "', found '" + got + "'");
  }
  std::uint64_t num() {
    const auto w = word();
    char* end = nullptr;
    const auto v = std::strtoull(w.c_str(), &end, 10);
    if (w.empty() || *end != '\0' || w[0] == '-') fail(ErrorKind::kModelFormat, "bad count '" + w + "'");
    return v;
  }
  std::int64_t inum() {
    const auto w = word();
    char* end = nullptr;
    const auto v = std::strtoll(w.c_str(), &end, 10);
    if (w.empty() || *end != '\0') fail(ErrorKind::kModelFormat, "bad integer '" + w + "'");
    return v;
  }
  double real() {
    const auto w = word();
    char* end = nullptr;
    const double v = std::strtod(w.c_str(), &end);
    if (w.empty() || *end != '\0') fail(ErrorKind::kModelFormat, "bad real '" + w + "'");
    return v;
  }
  // Guards against absurd sizes in corrupted files.
  std::size_t count(std::size_t limit = 100'000'000) {
    const auto v = num();
    if (v > limit) fail(ErrorKind::kModelFormat, "count out of range");
    return static_cast<std::size_t>(v);
  }

 private:
  std::istream& in_;
};

inline void write_tree(TokenWriter& w, const DecisionTree& t) {
  w.word("dtree").num(t.num_features).num(t.nodes.size());
  w.newline();
  for (const auto& n : t.nodes) {
    w.inum(n.feature).real(n.threshold).num(n.left).num(n.right).num(n.counts[0]).num(n.counts[1]);
    w.newline();
  }
}

inline void check_links(std::size_t id, std::uint32_t child, std::size_t size) {
  if (child <= id || child >= size) fail(ErrorKind::kModelFormat, "node link out of range");
}

inline DecisionTree read_tree_body(TokenReader& r) {
  DecisionTree t;
  t.num_features = r.count();
  t.nodes.resize(r.count());
  if (t.nodes.empty()) fail(ErrorKind::kModelFormat, "tree without nodes");
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    auto& n = t.nodes[i];
    n.feature = static_cast<std::int32_t>(r.inum());
    n.threshold = r.real();
    n.left = static_cast<std::uint32_t>(r.num());
    n.right = static_cast<std::uint32_t>(r.num());
    n.counts = {r.count(), r.count()};
    if (!n.is_leaf()) {
      if (static_cast<std::size_t>(n.feature) >= t.num_features) {
        fail(ErrorKind::kModelFormat, "split feature out of range");
      }
      check_links(i, n.left, t.nodes.size());
      check_links(i, n.right, t.nodes.size());
    }
  }
  return t;
}

inline void write_forest(TokenWriter& w, const ForestModel& f) {
  w.word("forest").num(f.num_features);
  if (f.oob_error) {
    w.real(*f.oob_error);
  } else {
    w.word("none");
  }
  w.num(f.trees.size());
  w.newline();
  for (std::size_t t = 0; t < f.trees.size(); ++t) {
    write_tree(w, f.trees[t]);
    const auto& oob = t < f.oob_rows.size() ? f.oob_rows[t] : std::vector<std::size_t>{};
    w.word("oob").num(oob.size());
    for (auto i : oob) w.num(i);
    w.newline();
  }
}

inline ForestModel read_forest_body(TokenReader& r) {
  ForestModel f;
  f.num_features = r.count();
  const auto oob = r.word();
  if (oob != "none") {
    char* end = nullptr;
    f.oob_error = std::strtod(oob.c_str(), &end);
    if (*end != '\0') fail(ErrorKind::kModelFormat, "bad oob error '" + oob + "'");
  }
  const auto n = r.count();
  if (n == 0) fail(ErrorKind::kModelFormat, "forest without trees");
  for (std::size_t t = 0; t < n; ++t) {
    r.expect("dtree");
    f.trees.push_back(read_tree_body(r));
    if (f.trees.back().num_features != f.num_features) {
      fail(ErrorKind::kModelFormat, "tree width differs from forest width");
    }
    r.expect("oob");
    std::vector<std::size_t> rows(r.count());
    for (auto& i : rows) i = r.count(SIZE_MAX);
    f.oob_rows.push_back(std::move(rows));
  }
  return f;
}

inline void write_gbt(TokenWriter& w, const BoostedModel& m) {
  const auto& p = m.params;
  w.word("gbt").num(m.num_features)
      .word(p.loss == BoostLoss::kLogistic ? "logistic" : "squared")
      .num(p.n_rounds).real(p.learning_rate).real(p.lambda).real(p.gamma).num(p.max_depth)
      .real(p.base_score).num(m.trees.size());
  w.newline();
  for (const auto& t : m.trees) {
    w.num(t.nodes.size());
    w.newline();
    for (const auto& n : t.nodes) {
      w.inum(n.feature).real(n.threshold).num(n.left).num(n.right).real(n.weight);
      w.newline();
    }
  }
}

inline BoostedModel read_gbt_body(TokenReader& r) {
  BoostedModel m;
  m.num_features = r.count();
  const auto loss = r.word();
  if (loss == "logistic") {
    m.params.loss = BoostLoss::kLogistic;
  } else if (loss == "squared") {
    m.params.loss = BoostLoss::kSquaredError;
  } else {
    fail(ErrorKind::kModelFormat, "unknown loss '" + loss + "'");
  }
  m.params.n_rounds = r.count();
  m.params.learning_rate = r.real();
  m.params.lambda = r.real();
  m.params.gamma = r.real();
  m.params.max_depth = r.count();
  m.params.base_score = r.real();
  m.trees.resize(r.count());
  for (auto& t : m.trees) {
    t.nodes.resize(r.count());
    if (t.nodes.empty()) fail(ErrorKind::kModelFormat, "regression tree without nodes");
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
      auto& n = t.nodes[i];
      n.feature = static_cast<std::int32_t>(r.inum());
      n.threshold = r.real();
      n.left = static_cast<std::uint32_t>(r.num());
      n.right = static_cast<std::uint32_t>(r.num());
      n.weight = r.real();
      if (!n.is_leaf()) {
        if (static_cast<std::size_t>(n.feature) >= m.num_features) {
          fail(ErrorKind::kModelFormat, "split feature out of range");
        }
        check_links(i, n.left, t.nodes.size());
        check_links(i, n.right, t.nodes.size());
      }
    }
  }
  return m;
}

inline void write_model(TokenWriter& w, const SavedModel& model);

inline void write_base(TokenWriter& w, const Model& model) {
  std::visit([&](const auto& m) { write_model(w, SavedModel{m}); }, model);
}

inline void write_model(TokenWriter& w, const SavedModel& model) {
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, DecisionTree>) {
          write_tree(w, m);
        } else if constexpr (std::is_same_v<M, ForestModel>) {
          write_forest(w, m);
        } else if constexpr (std::is_same_v<M, BoostedModel>) {
          write_gbt(w, m);
        } else if constexpr (std::is_same_v<M, ConstantModel>) {
          w.word("constant").num(m.num_features).real(m.score);
          w.newline();
        } else {
          w.word("stack")
              .word(m.config.meta_input == MetaInput::kScores ? "scores" : "labels")
              .num(m.base_models.size());
          w.newline();
          for (const auto& b : m.base_models) write_base(w, b);
          write_forest(w, m.meta_model);
        }
      },
      model);
}

inline SavedModel read_model(TokenReader& r, int depth = 0);

inline Model read_base(TokenReader& r) {
  return std::visit(
      [](auto&& m) -> Model {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, StackedModel>) {
          fail(ErrorKind::kModelFormat, "nested stacks are not supported");
        } else {
          return std::move(m);
        }
      },
      read_model(r, 1));
}

inline SavedModel read_model(TokenReader& r, int depth) {
  const auto kind = r.word();
  if (kind == "dtree") return read_tree_body(r);
  if (kind == "forest") return read_forest_body(r);
  if (kind == "gbt") return read_gbt_body(r);
  if (kind == "constant") {
    ConstantModel c;
    c.num_features = r.count();
    c.score = r.real();
    return c;
  }
  if (kind == "stack" && depth == 0) {
    StackedModel s;
    const auto input = r.word();
    if (input == "scores") {
      s.config.meta_input = MetaInput::kScores;
    } else if (input == "labels") {
      s.config.meta_input = MetaInput::kLabels;
    } else {
      fail(ErrorKind::kModelFormat, "unknown meta input '" + input + "'");
    }
    const auto nb = r.count(1024);
    if (nb == 0) fail(ErrorKind::kModelFormat, "stack without base models");
    s.config.base_specs.clear();
    for (std::size_t b = 0; b < nb; ++b) s.base_models.push_back(read_base(r));
    r.expect("forest");
    s.meta_model = read_forest_body(r);
    if (s.meta_model.num_features != nb) {
      fail(ErrorKind::kModelFormat, "meta learner width differs from base count");
    }
    return s;
  }
  fail(ErrorKind::kModelFormat, "unknown model kind '" + kind + "'");
}

}  // namespace detail

inline void write_model_file(std::ostream& out, const ModelFile& file) {
  detail::TokenWriter w(out);
  w.word(kModelMagic).num(kModelFormatVersion);
  w.newline();
  w.word("name").word(file.name.empty() ? "unnamed" : file.name);
  w.newline();
  if (file.scaler) {
    const auto& s = *file.scaler;
    w.word("scaler").num(s.columns.size());
    for (auto c : s.columns) w.num(c);
    for (auto m : s.means) w.real(m);
    for (auto sd : s.stds) w.real(sd);
  } else {
    w.word("scaler").word("none");
  }
  w.newline();
  detail::write_model(w, file.model);
  w.word("end");
  w.newline();
}

inline ModelFile read_model_file(std::istream& in) {
  detail::TokenReader r(in);
  if (r.word() != kModelMagic) fail(ErrorKind::kModelFormat, "not an hfstack model file");
  const auto version = r.inum();
  if (version != kModelFormatVersion) {
    fail(ErrorKind::kModelFormat, "model format version " + std::to_string(version) +
                                      " is not supported (expected " +
                                      std::to_string(kModelFormatVersion) + ")");
  }
  ModelFile file;
  r.expect("name");
  file.name = r.word();
  r.expect("scaler");
  const auto first = r.word();
  if (first != "none") {
    char* end = nullptr;
    const auto k = std::strtoull(first.c_str(), &end, 10);
    if (*end != '\0' || k > 100000) fail(ErrorKind::kModelFormat, "bad scaler size");
    ScalerParams s;
    s.columns.resize(k);
    s.means.resize(k);
    s.stds.resize(k);
    for (auto& c : s.columns) c = r.count();
    for (auto& m : s.means) m = r.real();
    for (auto& sd : s.stds) sd = r.real();
    file.scaler = std::move(s);
  }
  file.model = detail::read_model(r, 0);
  r.expect("end");
  return file;
}

inline void save_model_file(const std::string& path, const ModelFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write '" + path + "'");
  write_model_file(out, file);
  if (!out) fail(ErrorKind::kIo, "failed writing '" + path + "'");
}

inline ModelFile load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path + "'");
  return read_model_file(in);
}

}  // namespace hfstack

#endif  // HFSTACK_SERIALIZE_HPP_
