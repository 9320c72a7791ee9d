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
#include "bayes_oracle.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "error.hpp"

namespace imbcal {
namespace {

// Abramowitz and Stegun 26.2.17, kept here as an oracle that does not share
// code with the library's erfc-based CDF.
double phi_reference(double x) {
  const double t = 1.0 / (1.0 + 0.2316419 * std::abs(x));
  const double poly =
      t * (0.319381530 + t * (-0.356563782 + t * (1.781477937 + t * (-1.821255978 + t * 1.330274429))));
  const double tail = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI) * poly;
  return x >= 0 ? 1.0 - tail : tail;
}

GaussianTaskSpec two_class(double mu0, double mu1, double sigma, std::vector<double> ps,
                           std::vector<double> pt) {
  GaussianTaskSpec spec = GaussianTaskSpec::canonical();
  spec.means = {mu0, mu1};
  spec.stds = {sigma, sigma};
  spec.source_prior = PriorVector(std::move(ps), PriorRole::kSource);
  spec.target_prior = PriorVector(std::move(pt), PriorRole::kTarget);
  return spec;
}

TEST(NormalCdfTest, AgreesWithPolynomialReference) {
  for (double x = -6.0; x <= 6.0; x += 0.37) {
    EXPECT_NEAR(normal_cdf(x), phi_reference(x), 1e-7) << x;
  }
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
}

TEST(ExactPosteriorTest, SymmetricMidpoint) {
  const GaussianTaskSpec spec = two_class(-1.0, 1.0, 1.0, {0.5, 0.5}, {0.5, 0.5});
  const auto p = exact_posterior(spec, 0.0, spec.source_prior);
  EXPECT_NEAR(p[0], 0.5, 1e-15);
  EXPECT_NEAR(p[1], 0.5, 1e-15);
}

TEST(ExactPosteriorTest, MidpointCarriesPriorRatio) {
  const GaussianTaskSpec spec = GaussianTaskSpec::canonical();
  const auto p = exact_posterior(spec, 1.0, spec.source_prior);
  EXPECT_NEAR(p[0], 0.9, 1e-12);
  EXPECT_NEAR(p[1], 0.1, 1e-12);
}

TEST(ExactPosteriorTest, FarLeftTail) {
  const GaussianTaskSpec spec = GaussianTaskSpec::canonical();
  const auto p = exact_posterior(spec, -40.0, spec.source_prior);
  EXPECT_NEAR(p[0], 1.0, 1e-12);
  EXPECT_TRUE(std::isfinite(p[1]));
}

TEST(RebalancedRuleTest, CanonicalThreshold) {
  const DecisionRule rule = rebalanced_rule(GaussianTaskSpec::canonical());
  ASSERT_TRUE(rule.is_threshold());
  EXPECT_NEAR(rule.threshold_value(), 1.0, 1e-12);
  EXPECT_EQ(rule.below(), 0u);
  EXPECT_EQ(rule.above(), 1u);
}

TEST(RebalancedRuleTest, NoShiftMatchesSourceRule) {
  const GaussianTaskSpec spec = two_class(0.0, 2.0, 1.0, {0.9, 0.1}, {0.9, 0.1});
  EXPECT_NEAR(rebalanced_rule(spec).threshold_value(), 1.0 + std::log(9.0) / 2.0, 1e-12);
  EXPECT_NEAR(source_rule(GaussianTaskSpec::canonical()).threshold_value(), 2.0986, 1e-4);
}

TEST(RebalancedRuleTest, SymmetricTaskMidpoint) {
  const GaussianTaskSpec spec = two_class(-3.0, 5.0, 2.0, {0.5, 0.5}, {0.5, 0.5});
  EXPECT_NEAR(rebalanced_rule(spec).threshold_value(), 1.0, 1e-12);
}

TEST(RiskTest, CanonicalRisks) {
  const GaussianTaskSpec spec = GaussianTaskSpec::canonical();
  const double r_reb = risk(rebalanced_rule(spec), spec, spec.target_prior);
  const double r_src = risk(source_rule(spec), spec, spec.target_prior);
  EXPECT_NEAR(r_reb, phi_reference(-1.0), 1e-6);
  EXPECT_NEAR(r_reb, 0.15866, 1e-4);
  const double t = 1.0 + std::log(9.0) / 2.0;
  EXPECT_NEAR(r_src, 0.5 * (1.0 - phi_reference(t)) + 0.5 * phi_reference(t - 2.0), 1e-6);
  EXPECT_NEAR(r_src, 0.27861, 1e-4);
}

TEST(RiskTest, SeparatedMeansHaveNoRisk) {
  const GaussianTaskSpec spec = two_class(0.0, 1000.0, 1.0, {0.9, 0.1}, {0.5, 0.5});
  EXPECT_NEAR(risk(rebalanced_rule(spec), spec, spec.target_prior), 0.0, 1e-15);
}

TEST(ThresholdSweepTest, FindsNothingBetterThanRebalancedRule) {
  const GaussianTaskSpec spec = GaussianTaskSpec::canonical();
  const ThresholdSweep sweep = threshold_sweep(spec, spec.target_prior, 1e-3);
  const double r = risk(rebalanced_rule(spec), spec, spec.target_prior);
  EXPECT_GE(sweep.best_risk, r - 1e-12);
  EXPECT_NEAR(sweep.best_threshold, 1.0, 1e-3);
  EXPECT_FALSE(sweep.curve.empty());
}

TEST(MonteCarloTest, TracksExactRisk) {
  const GaussianTaskSpec spec = GaussianTaskSpec::canonical();
  const DecisionRule rule = rebalanced_rule(spec);
  const double mc = monte_carlo_risk(rule, spec, spec.target_prior, 200000, 5);
  EXPECT_NEAR(mc, risk(rule, spec, spec.target_prior), 5e-3);
}

TEST(SampleTest, DeterministicPerSeed) {
  const GaussianTaskSpec spec = GaussianTaskSpec::canonical();
  const Sample a = sample(spec, spec.source_prior, 100, 3);
  const Sample b = sample(spec, spec.source_prior, 100, 3);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.labels, b.labels);
}

TEST(TaskSpecTest, ParsesKeyValueText) {
  const GaussianTaskSpec spec = parse_task_spec(
      "# two classes\nmeans = 0, 2\nstds = 1, 1\nsource_prior = 0.9, 0.1\ntarget_prior = uniform\n");
  EXPECT_EQ(spec.n_classes(), 2u);
  EXPECT_TRUE(spec.equal_variance());
  EXPECT_DOUBLE_EQ(spec.target_prior[1], 0.5);
}

TEST(TaskSpecTest, RejectsBadSpecs) {
  EXPECT_THROW(parse_task_spec("means = 0, 2\nstds = 1\nsource_prior = 0.9, 0.1\n"
                               "target_prior = uniform\n"),
               ValidationError);
  EXPECT_THROW(parse_task_spec("means = 0, 2\nstds = 1, -1\nsource_prior = 0.9, 0.1\n"
                               "target_prior = uniform\n"),
               ValidationError);
  EXPECT_THROW(parse_task_spec("means = 0, 2\nstds = 1, 1\nsource_prior = 0.9, 0.1\n"
                               "target_prior = uniform\ncolour = blue\n"),
               ValidationError);
  EXPECT_THROW(parse_task_spec("means = 0, 2\n"), ValidationError);
}

TEST(OracleTest, CanonicalReport) {
  const OracleReport r = run_oracle(GaussianTaskSpec::canonical(), 1e-3, 1);
  EXPECT_NEAR(r.rebalanced_threshold, 1.0, 1e-6);
  EXPECT_NEAR(r.rebalanced_risk, 0.15866, 1e-4);
  EXPECT_NEAR(r.source_risk, 0.27861, 1e-4);
  EXPECT_TRUE(r.certificate_holds);
  EXPECT_NE(to_json(r).find("certificate_holds"), std::string::npos);
  EXPECT_EQ(risk_curve_csv(r).substr(0, 15), "threshold,risk\n");
}

}  // namespace
}  // namespace imbcal
