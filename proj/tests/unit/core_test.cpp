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
#include "core.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "error.hpp"

namespace imbcal {
namespace {

PosteriorMatrix softmax_rows(std::vector<double> logits, std::size_t k) {
  const std::size_t n = logits.size() / k;
  return softmax(LogitMatrix(Matrix(n, k, std::move(logits))));
}

TEST(SoftmaxTest, ZeroRowIsUniform) {
  const PosteriorMatrix p = softmax_rows({0.0, 0.0}, 2);
  EXPECT_DOUBLE_EQ(p(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(p(0, 1), 0.5);
}

TEST(SoftmaxTest, LogThreeGivesThreeToOne) {
  const PosteriorMatrix p = softmax_rows({std::log(3.0), 0.0}, 2);
  EXPECT_NEAR(p(0, 0), 0.75, 1e-15);
  EXPECT_NEAR(p(0, 1), 0.25, 1e-15);
}

TEST(SoftmaxTest, HugeLogitDoesNotOverflow) {
  const PosteriorMatrix p = softmax_rows({1000.0, 0.0, -1000.0, 0.0}, 2);
  EXPECT_DOUBLE_EQ(p(0, 0), 1.0);
  EXPECT_GE(p(0, 1), 0.0);
  EXPECT_LT(p(0, 1), 1e-300);
  EXPECT_DOUBLE_EQ(p(1, 1), 1.0);
}

TEST(SoftmaxTest, InvariantToRowShift) {
  const PosteriorMatrix a = softmax_rows({1.0, 2.0, 3.0}, 3);
  const PosteriorMatrix b = softmax_rows({101.0, 102.0, 103.0}, 3);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(a(0, k), b(0, k), 1e-13);
}

TEST(LogitMatrixTest, RejectsNonFiniteAndSingleClass) {
  EXPECT_THROW(LogitMatrix(Matrix(1, 2, {0.0, std::nan("")})), ValidationError);
  EXPECT_THROW(LogitMatrix(Matrix(1, 2, {0.0, std::numeric_limits<double>::infinity()})),
               ValidationError);
  EXPECT_THROW(LogitMatrix(Matrix(2, 1, {0.0, 1.0})), ValidationError);
  EXPECT_THROW(LogitMatrix(Matrix(0, 2)), ValidationError);
}

TEST(PosteriorMatrixTest, ValidatesRows) {
  EXPECT_NO_THROW(PosteriorMatrix(Matrix(1, 2, {0.3, 0.7})));
  EXPECT_THROW(PosteriorMatrix(Matrix(1, 2, {0.3, 0.6})), ValidationError);
  EXPECT_THROW(PosteriorMatrix(Matrix(1, 2, {-0.1, 1.1})), ValidationError);
  EXPECT_THROW(PosteriorMatrix(Matrix(1, 2, {std::nan(""), 1.0})), ValidationError);
}

TEST(PosteriorMatrixTest, AcceptsRoundingNoise) {
  EXPECT_NO_THROW(PosteriorMatrix(Matrix(1, 3, {0.1, 0.2, 0.7 + 1e-12})));
}

TEST(PriorVectorTest, Validation) {
  EXPECT_NO_THROW(PriorVector({0.9, 0.1}, PriorRole::kSource));
  EXPECT_THROW(PriorVector({0.9, 0.2}, PriorRole::kTarget), ValidationError);
  EXPECT_THROW(PriorVector({1.0, 0.0}, PriorRole::kSource), ValidationError);
  EXPECT_NO_THROW(PriorVector({1.0, 0.0}, PriorRole::kTarget));
  EXPECT_THROW(PriorVector({1.0}, PriorRole::kTarget), ValidationError);
}

TEST(PriorVectorTest, Uniform) {
  const PriorVector u = PriorVector::uniform(4, PriorRole::kTarget);
  ASSERT_EQ(u.size(), 4u);
  for (double v : u.values()) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(EstimateSourcePriorTest, CountsLabels) {
  const PriorVector p = estimate_source_prior(LabelVector({0, 0, 0, 1}, 2), 2);
  EXPECT_DOUBLE_EQ(p[0], 0.75);
  EXPECT_DOUBLE_EQ(p[1], 0.25);
}

TEST(EstimateSourcePriorTest, FloorsMissingClass) {
  const double eps = 1e-12;
  const PriorVector p = estimate_source_prior(LabelVector({0, 0}, 2), 2, eps);
  EXPECT_GT(p[1], 0.0);
  EXPECT_NEAR(p[1], eps / (1.0 + eps), 1e-24);
  EXPECT_NEAR(p[0] + p[1], 1.0, 1e-15);
}

TEST(EstimateSourcePriorTest, BalancedThreeClasses) {
  const PriorVector p = estimate_source_prior(LabelVector({0, 1, 2}, 3), 3);
  for (double v : p.values()) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
}

TEST(LabelVectorTest, RejectsOutOfRange) {
  EXPECT_THROW(LabelVector({0, 2}, 2), ValidationError);
}

TEST(ArgmaxTest, Examples) {
  const std::vector<double> a{0.2, 0.8}, b{0.5, 0.5}, c{0.3, 0.3, 0.4};
  EXPECT_EQ(argmax(a), 1u);
  EXPECT_EQ(argmax(b), 0u);
  EXPECT_EQ(argmax(c), 2u);
}

TEST(ArgmaxTest, RowWise) {
  const PosteriorMatrix p(Matrix(3, 2, {0.2, 0.8, 0.5, 0.5, 0.9, 0.1}));
  const LabelVector labels = argmax_row(p);
  EXPECT_EQ(labels, LabelVector({1, 0, 0}, 2));
}

TEST(NumericsTest, LogSumExpIsStable) {
  const std::vector<double> x{1000.0, 1000.0};
  EXPECT_NEAR(log_sum_exp(x), 1000.0 + std::log(2.0), 1e-12);
}

TEST(NumericsTest, FlooredLogClampsZeros) {
  const std::vector<double> p{0.0, 1.0};
  std::vector<double> out(2);
  floored_log(p, 1e-12, out);
  // The floored row is renormalised before the log.
  const double total = 1.0 + 1e-12;
  EXPECT_NEAR(out[0], std::log(1e-12 / total), 1e-12);
  EXPECT_NEAR(out[1], std::log(1.0 / total), 1e-15);
}

TEST(NumericsTest, ExpNormalizeInPlace) {
  std::vector<double> x{std::log(1.0), std::log(3.0)};
  exp_normalize(x, x);
  EXPECT_NEAR(x[0], 0.25, 1e-15);
  EXPECT_NEAR(x[1], 0.75, 1e-15);
}

TEST(CalibrationConfigTest, RejectsNegativeLambda) {
  CalibrationConfig cfg;
  cfg.lambda = -0.1;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg.lambda = 3.0;
  EXPECT_NO_THROW(cfg.validate());
  cfg.epsilon = 0.0;
  EXPECT_THROW(cfg.validate(), ValidationError);
}

}  // namespace
}  // namespace imbcal
