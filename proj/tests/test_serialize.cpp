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

#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "hfstack/serialize.hpp"
#include "test_support.hpp"

namespace hfstack {
namespace {

struct Fixture {
  Matrix x;
  Labels y;
  Matrix probe;
};

Fixture make_fixture() {
  Prng prng(51);
  Fixture f{Matrix(80, 4), Labels(80), Matrix(50, 4)};
  for (std::size_t r = 0; r < 80; ++r) {
    for (std::size_t c = 0; c < 4; ++c) f.x(r, c) = prng.uniform() * 3.0 - 1.0;
    f.y[r] = f.x(r, 0) + 0.5 * f.x(r, 1) + 0.3 * (prng.uniform() - 0.5) > 0.4 ? 1 : 0;
  }
  for (std::size_t r = 0; r < 50; ++r) {
    for (std::size_t c = 0; c < 4; ++c) f.probe(r, c) = prng.uniform() * 4.0 - 1.5;
  }
  return f;
}

std::string to_text(const ModelFile& file) {
  std::ostringstream o;
  write_model_file(o, file);
  return o.str();
}

ModelFile from_text(const std::string& text) {
  std::istringstream in(text);
  return read_model_file(in);
}

void expect_same_predictions(const SavedModel& a, const SavedModel& b, const Matrix& probe) {
  for (std::size_t r = 0; r < probe.rows(); ++r) {
    const auto pa = predict(a, probe.row(r)), pb = predict(b, probe.row(r));
    ASSERT_EQ(pa.label, pb.label);
    ASSERT_EQ(pa.score, pb.score);
  }
}

void round_trip(const SavedModel& model, const Matrix& probe) {
  ModelFile file{"m", ScalerParams{{0, 2}, {0.125, -3.5}, {1.0 / 3.0, 2.0}}, model};
  const std::string text = to_text(file);
  const ModelFile back = from_text(text);
  EXPECT_EQ(back.name, "m");
  ASSERT_TRUE(back.scaler.has_value());
  EXPECT_EQ(back.scaler->means, file.scaler->means);
  EXPECT_EQ(back.scaler->stds, file.scaler->stds);
  expect_same_predictions(model, back.model, probe);
  EXPECT_EQ(to_text(back), text);
}

TEST(Serialize, TreeRoundTrip) {
  const auto f = make_fixture();
  const auto tree = fit_tree(f.x, f.y);
  round_trip(tree, f.probe);
  EXPECT_EQ(std::get<DecisionTree>(from_text(to_text({"t", std::nullopt, tree})).model), tree);
}

TEST(Serialize, ForestRoundTrip) {
  const auto f = make_fixture();
  ForestParams fp;
  fp.n_trees = 12;
  const auto forest = fit_forest(f.x, f.y, fp);
  round_trip(forest, f.probe);
  EXPECT_EQ(std::get<ForestModel>(from_text(to_text({"f", std::nullopt, forest})).model), forest);
}

TEST(Serialize, BoostedRoundTrip) {
  const auto f = make_fixture();
  GbtParams gp;
  gp.n_rounds = 20;
  const auto gbt = fit_gbt(f.x, f.y, gp);
  round_trip(gbt, f.probe);
  EXPECT_EQ(std::get<BoostedModel>(from_text(to_text({"g", std::nullopt, gbt})).model), gbt);
}

TEST(Serialize, StackRoundTrip) {
  const auto f = make_fixture();
  StackConfig cfg;
  GbtParams gp;
  gp.n_rounds = 10;
  ForestParams fp;
  fp.n_trees = 8;
  cfg.base_specs = {TreeParams{}, fp, gp, ConstantLearner{0.3}};
  cfg.meta_spec = fp;
  round_trip(fit_stack(f.x, f.y, cfg), f.probe);
}

TEST(Serialize, NoScaler) {
  const ModelFile file{"c", std::nullopt, ConstantModel{0.25, 4}};
  const auto back = from_text(to_text(file));
  EXPECT_FALSE(back.scaler.has_value());
  EXPECT_EQ(std::get<ConstantModel>(back.model), (ConstantModel{0.25, 4}));
}

ErrorKind read_error(const std::string& text) {
  try {
    from_text(text);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "accepted: " << text;
  return ErrorKind::kIo;
}

TEST(Serialize, RejectsOtherVersionsAndGarbage) {
  std::string text = to_text({"c", std::nullopt, ConstantModel{0.25, 4}});
  const std::string other = "HFSTACK-MODEL 2" + text.substr(text.find('\n'));
  EXPECT_EQ(read_error(other), ErrorKind::kModelFormat);
  EXPECT_EQ(read_error("hello world"), ErrorKind::kModelFormat);
  EXPECT_EQ(read_error(text.substr(0, text.size() / 2)), ErrorKind::kModelFormat);
  EXPECT_EQ(read_error("HFSTACK-MODEL 1\nname x\nscaler none\ndtree 1 1 0 0 5 7 0 0\nend\n"),
            ErrorKind::kModelFormat);
}

TEST(Serialize, FileHelpers) {
  const auto dir = testing::scratch_dir("serialize");
  const auto path = (dir / "m.model").string();
  save_model_file(path, {"c", std::nullopt, ConstantModel{0.5, 2}});
  EXPECT_EQ(load_model_file(path).name, "c");
  try {
    load_model_file((dir / "missing.model").string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

}  // namespace
}  // namespace hfstack
