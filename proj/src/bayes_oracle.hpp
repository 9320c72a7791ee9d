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
#ifndef IMBCAL_BAYES_ORACLE_HPP_
#define IMBCAL_BAYES_ORACLE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "core.hpp"

namespace imbcal {

// 1-D Gaussian class conditionals f(x|k) = N(mean_k, std_k^2) with a source
// (training) and target (test) label prior.
struct GaussianTaskSpec {
  std::vector<double> means;
  std::vector<double> stds;
  PriorVector source_prior;
  PriorVector target_prior;
  std::size_t n_train = 10000;
  std::size_t n_val = 2000;
  std::size_t n_test = 10000;

  std::size_t n_classes() const noexcept { return means.size(); }
  bool equal_variance() const;
  void validate() const;

  // means (0, 2), std 1, source (0.9, 0.1), target uniform.
  static GaussianTaskSpec canonical();
};

// Key-value form:
//   means = 0, 2
//   stds = 1, 1
//   source_prior = 0.9, 0.1
//   target_prior = uniform        (or a comma list)
//   n_train = 10000               (optional, likewise n_val, n_test)
GaussianTaskSpec parse_task_spec(std::string_view text);
GaussianTaskSpec load_task_spec(const std::filesystem::path& path);

double normal_cdf(double z);

// f(x|k) P(k), normalized over k.
std::vector<double> exact_posterior(const GaussianTaskSpec& spec, double x,
                                    const PriorVector& priors);

// h(x). Either a threshold on x (class `below` for x <= t, `above`
// otherwise; t may be +-inf) or argmax_k P_s(k|x) * weight_k.
class DecisionRule {
 public:
  static DecisionRule threshold(double t, std::uint32_t below, std::uint32_t above);
  static DecisionRule weighted_argmax(std::vector<double> weights);

  bool is_threshold() const noexcept { return is_threshold_; }
  double threshold_value() const noexcept { return threshold_; }
  std::uint32_t below() const noexcept { return below_; }
  std::uint32_t above() const noexcept { return above_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  std::uint32_t predict(const GaussianTaskSpec& spec, double x) const;

 private:
  bool is_threshold_ = true;
  double threshold_ = 0.0;
  std::uint32_t below_ = 0;
  std::uint32_t above_ = 1;
  std::vector<double> weights_;
};

// argmax_y P_s(y|x) P_t(y) / P_s(y). Two equal-variance classes reduce to a
// closed-form threshold; anything else stays a weighted argmax.
DecisionRule rebalanced_rule(const GaussianTaskSpec& spec);
// argmax_y P_s(y|x): the Bayes rule of the source distribution.
DecisionRule source_rule(const GaussianTaskSpec& spec);

// P(h(x) != y) under `priors`, exact through the normal CDF. Requires a
// two-class threshold rule.
double risk(const DecisionRule& rule, const GaussianTaskSpec& spec, const PriorVector& priors);

struct ThresholdSweep {
  double best_threshold = 0.0;
  double best_risk = 0.0;
  std::uint32_t best_below = 0;
  // (threshold, risk) with the lower-mean class predicted below threshold.
  std::vector<std::pair<double, double>> curve;
};

// Risk of every threshold rule on a grid of step `resolution` spanning
// +-8 std around the means, in both orientations.
ThresholdSweep threshold_sweep(const GaussianTaskSpec& spec, const PriorVector& priors,
                               double resolution);

struct Sample {
  std::vector<double> features;
  LabelVector labels;
};

// Labels from `priors`, features from the class conditionals. Deterministic
// for a given seed.
Sample sample(const GaussianTaskSpec& spec, const PriorVector& priors, std::size_t n,
              std::uint64_t seed);

double empirical_risk(const DecisionRule& rule, const GaussianTaskSpec& spec,
                      const Sample& data);
double monte_carlo_risk(const DecisionRule& rule, const GaussianTaskSpec& spec,
                        const PriorVector& priors, std::size_t n, std::uint64_t seed);

// Everything the `oracle` command reports for a two-class spec.
struct OracleReport {
  double rebalanced_threshold = 0.0;
  double source_threshold = 0.0;
  double rebalanced_risk = 0.0;  // under the target prior
  double source_risk = 0.0;      // under the target prior
  double sweep_best_threshold = 0.0;
  double sweep_best_risk = 0.0;
  double sweep_resolution = 0.0;
  double empirical_rebalanced_risk = 0.0;
  double empirical_source_risk = 0.0;
  std::size_t empirical_samples = 0;
  bool certificate_holds = false;
  std::vector<std::pair<double, double>> risk_curve;
};

OracleReport run_oracle(const GaussianTaskSpec& spec, double resolution, std::uint64_t seed);
std::string to_json(const OracleReport& report);
std::string risk_curve_csv(const OracleReport& report);

}  // namespace imbcal

#endif  // IMBCAL_BAYES_ORACLE_HPP_
