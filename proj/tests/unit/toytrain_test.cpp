/* Copyright 2026 The imbcal Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "toytrain.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "error.hpp"
#include "metrics.hpp"

namespace imbcal {
namespace {

ToyData blobs(std::size_t per_class, double gap, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 0.3);
  Matrix x(2 * per_class, 2);
  std::vector<std::uint32_t> y(2 * per_class);
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const std::uint32_t c = i < per_class ? 0 : 1;
    x(i, 0) = (c == 0 ? -gap : gap) + z(rng);
    x(i, 1) = z(rng);
    y[i] = c;
  }
  return {std::move(x), LabelVector(std::move(y), 2)};
}

std::size_t count_label(const LabelVector& y, std::uint32_t c) {
  return static_cast<std::size_t>(std::count(y.values().begin(), y.values().end(), c));
}

TEST(GenerateTest, ImbalancedSizes) {
  ToyDatasetSpec spec;
  EXPECT_EQ(spec.minority_size(), 278u);
  const ToyData data = generate(spec);
  EXPECT_EQ(count_label(data.labels, 0), 2500u);
  EXPECT_EQ(count_label(data.labels, 1), 278u);
  EXPECT_EQ(data.features.cols(), 2u);
}

TEST(GenerateTest, RatioOneIsBalanced) {
  ToyDatasetSpec spec;
  spec.imbalance_ratio = 1.0;
  spec.majority_size = 300;
  spec.shape = ToyShape::kCircle;
  const ToyData data = generate(spec);
  EXPECT_EQ(count_label(data.labels, 0), count_label(data.labels, 1));
}

TEST(GenerateTest, DeterministicPerSeed) {
  ToyDatasetSpec spec;
  spec.seed = 9;
  const ToyData a = generate(spec), b = generate(spec);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.labels, b.labels);
  spec.seed = 10;
  EXPECT_FALSE(generate(spec).features == a.features);
}

TEST(GenerateTest, CircleRadii) {
  ToyDatasetSpec spec;
  spec.shape = ToyShape::kCircle;
  spec.noise = 0.0;
  spec.majority_size = 200;
  const ToyData data = generate(spec);
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    const double r = std::hypot(data.features(i, 0), data.features(i, 1));
    EXPECT_NEAR(r, data.labels[i] == 0 ? 1.0 : 0.5, 1e-12);
  }
}

TEST(GenerateTest, RejectsBadSpec) {
  ToyDatasetSpec spec;
  spec.imbalance_ratio = 0.5;
  EXPECT_THROW(generate(spec), ValidationError);
  spec = {};
  spec.majority_size = 0;
  EXPECT_THROW(generate(spec), ValidationError);
}

TEST(SplitTest, StratifiedFractions) {
  const ToyData data = generate(ToyDatasetSpec{});
  const ToySplits s = stratified_split(data, 0.2, 0.2, 4);
  EXPECT_EQ(s.train.labels.size() + s.val.labels.size() + s.test.labels.size(), data.labels.size());
  EXPECT_EQ(count_label(s.val.labels, 0), 500u);
  EXPECT_EQ(count_label(s.test.labels, 0), 500u);
  EXPECT_NEAR(static_cast<double>(count_label(s.val.labels, 1)), 278 * 0.2, 1.0);
}

TEST(MlpTest, GradientMatchesFiniteDifferences) {
  MlpModel model({2, 4, 4, 2}, 3);
  const ToyData data = blobs(6, 0.5, 1);
  std::vector<double> grad(model.parameters().size());
  model.loss_and_gradient(data.features, data.labels, grad);
  const double h = 1e-6;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double saved = model.parameters()[i];
    model.parameters()[i] = saved + h;
    const double up = model.loss(data.features, data.labels);
    model.parameters()[i] = saved - h;
    const double down = model.loss(data.features, data.labels);
    model.parameters()[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    EXPECT_NEAR(grad[i], numeric, 1e-4 * std::max(1.0, std::abs(numeric))) << "parameter " << i;
  }
}

TEST(MlpTest, ZeroEpochsLeavesWeights) {
  const MlpModel model({2, 8, 8, 2}, 5);
  const TrainResult r = train(model, blobs(10, 2.0, 2), TrainConfig{0, 0.1});
  EXPECT_TRUE(std::equal(r.model.parameters().begin(), r.model.parameters().end(),
                         model.parameters().begin()));
  EXPECT_TRUE(r.loss_history.empty());
}

TEST(MlpTest, SeparableDataIsLearned) {
  const ToyData data = blobs(100, 2.0, 3);
  const TrainResult r = train(MlpModel({2, 8, 8, 2}, 4), data, TrainConfig{300, 0.5});
  EXPECT_GE(accuracy(confusion(argmax_row(r.model.predict(data.features)), data.labels)), 0.99);
  EXPECT_LT(r.loss_history.back(), r.loss_history.front());
}

TEST(MlpTest, DivergenceIsReported) {
  const ToyData data = blobs(20, 2.0, 3);
  MlpModel broken({2, 8, 8, 2}, 4);
  broken.parameters()[0] = std::nan("");
  EXPECT_THROW(train(broken, data, TrainConfig{10, 0.1}), NumericError);
}

TEST(BoundaryGridTest, LambdaZeroMatchesUncalibrated) {
  const MlpModel model({2, 8, 8, 2}, 6);
  const GridBounds b;
  const PriorVector s({0.9, 0.1}, PriorRole::kSource);
  const PriorVector t = PriorVector::uniform(2, PriorRole::kTarget);
  const BoundaryGrid plain = boundary_grid(model, b, 30);
  const BoundaryGrid zero = boundary_grid(model, b, 30, BoundaryCalibration{s, t, 0.0});
  EXPECT_EQ(plain.labels, zero.labels);
  EXPECT_EQ(plain.labels.size(), 900u);
}

TEST(BoundaryGridTest, RebalancingGrowsMinorityRegion) {
  const ToyData data = generate(ToyDatasetSpec{});
  const TrainResult r = train(MlpModel({2, 16, 16, 2}, 1), data, TrainConfig{300, 0.5});
  const GridBounds b = bounds_of(data.features);
  const PriorVector s({0.9, 0.1}, PriorRole::kSource);
  const PriorVector t = PriorVector::uniform(2, PriorRole::kTarget);
  const BoundaryGrid at0 = boundary_grid(r.model, b, 60);
  const BoundaryGrid at1 = boundary_grid(r.model, b, 60, BoundaryCalibration{s, t, 1.0});
  EXPECT_GT(at1.count(1), at0.count(1));
}

TEST(BoundaryGridTest, ConstantModelGivesConstantGrid) {
  MlpModel model({2, 4, 4, 2}, 7);
  auto p = model.parameters();
  std::fill(p.begin(), p.end(), 0.0);
  p[p.size() - 2] = 1.0;  // output bias for class 0
  const BoundaryGrid g = boundary_grid(model, GridBounds{}, 20);
  EXPECT_EQ(g.count(0), g.labels.size());
}

TEST(LambdaCurveTest, NoShiftPrefersLambdaZero) {
  const ToyData val = blobs(50, 0.4, 8);
  const MlpModel model({2, 4, 4, 2}, 9);
  const PriorVector u_s = PriorVector::uniform(2, PriorRole::kSource);
  const PriorVector u_t = PriorVector::uniform(2, PriorRole::kTarget);
  const LambdaCurve c = lambda_curve(model, val, u_s, u_t, SearchConfig{}, MetricKind::kMeanAccuracy);
  EXPECT_NEAR(c.best_lambda, 0.0, 0.1 + 1e-12);
  EXPECT_TRUE(c.unimodal);
}

TEST(LambdaCurveTest, SearchAgreesWithGridWhenUnimodal) {
  ToyExperimentConfig cfg;
  cfg.data.majority_size = 600;
  cfg.train = TrainConfig{300, 0.5};
  cfg.layer_sizes = {2, 16, 16, 2};
  cfg.grid_resolution = 30;
  const ToyExperiment exp = run_toy_experiment(cfg);
  if (exp.curve.unimodal) {
    double grid_score = exp.curve.curve.front().score;
    for (const auto& p : exp.curve.curve) grid_score = std::max(grid_score, p.score);
    EXPECT_EQ(exp.curve.search.score, grid_score);
    EXPECT_DOUBLE_EQ(exp.curve.best_lambda, exp.curve.search.lambda);
  } else {
    EXPECT_TRUE(exp.curve.fell_back_to_grid);
    EXPECT_DOUBLE_EQ(exp.curve.best_lambda, exp.curve.grid_lambda);
  }
}

TEST(ToyExperimentTest, ReproducibleAndMonotoneArea) {
  ToyExperimentConfig cfg;
  cfg.data.majority_size = 400;
  cfg.train = TrainConfig{200, 0.5};
  cfg.layer_sizes = {2, 8, 8, 2};
  cfg.grid_resolution = 25;
  const ToyExperiment a = run_toy_experiment(cfg);
  const ToyExperiment b = run_toy_experiment(cfg);
  EXPECT_EQ(to_json(a, cfg), to_json(b, cfg));
  EXPECT_EQ(boundary_csv(a.grid_at_zero, a.grid_at_best), boundary_csv(b.grid_at_zero, b.grid_at_best));
  EXPECT_TRUE(a.area_monotone);
  EXPECT_EQ(a.minority_area.size(), 11u);
  EXPECT_NE(boundary_svg(a).find("<svg"), std::string::npos);
  EXPECT_EQ(dataset_csv(a).substr(0, 8), "x,y,labe");
}

}  // namespace
}  // namespace imbcal
