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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "error.hpp"
#include "io.hpp"

namespace imbcal {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_density(double x, double mean, double std) {
  const double z = (x - mean) / std;
  return -0.5 * z * z - std::log(std) - 0.5 * std::log(2.0 * std::numbers::pi);
}

// Argmax of f(x|k) * P_s(k) * w_k. With two equal-variance classes the
// decision boundary is the root of a linear log-odds in x.
DecisionRule weighted_rule(const GaussianTaskSpec& spec, std::vector<double> weights) {
  if (spec.n_classes() != 2 || !spec.equal_variance()) {
    return DecisionRule::weighted_argmax(std::move(weights));
  }
  std::vector<double> offset(2);
  for (std::size_t k = 0; k < 2; ++k) {
    offset[k] = std::log(spec.source_prior[k]) + std::log(weights[k]);
  }
  const std::uint32_t lo = spec.means[0] <= spec.means[1] ? 0 : 1;
  const std::uint32_t hi = 1 - lo;
  const double gap = spec.means[hi] - spec.means[lo];
  if (gap == 0.0) {
    // Identical likelihoods: the prior term alone decides.
    const std::uint32_t pick = offset[1] > offset[0] ? 1 : 0;
    return DecisionRule::threshold(kInf, pick, 1 - pick);
  }
  const double var = spec.stds[0] * spec.stds[0];
  const double t = 0.5 * (spec.means[lo] + spec.means[hi]) + var * (offset[lo] - offset[hi]) / gap;
  return DecisionRule::threshold(t, lo, hi);
}

nlohmann::ordered_json json_number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

bool GaussianTaskSpec::equal_variance() const {
  return std::all_of(stds.begin(), stds.end(), [&](double s) { return s == stds.front(); });
}

void GaussianTaskSpec::validate() const {
  if (means.size() < 2) throw ValidationError("task spec: need at least two classes");
  if (stds.size() != means.size()) throw ValidationError("task spec: means and stds differ in length");
  if (source_prior.size() != means.size() || target_prior.size() != means.size()) {
    throw ValidationError("task spec: prior length does not match class count");
  }
  for (double m : means) {
    if (!std::isfinite(m)) throw ValidationError("task spec: non-finite mean");
  }
  for (double s : stds) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("task spec: std must be positive");
  }
}

GaussianTaskSpec GaussianTaskSpec::canonical() {
  return GaussianTaskSpec{{0.0, 2.0},
                          {1.0, 1.0},
                          PriorVector({0.9, 0.1}, PriorRole::kSource),
                          PriorVector::uniform(2, PriorRole::kTarget)};
}

GaussianTaskSpec parse_task_spec(std::string_view text) {
  auto kv = parse_key_value(text);
  auto take = [&](const char* key) -> std::string {
    auto it = kv.find(key);
    if (it == kv.end()) throw ValidationError(std::string("task spec: missing key '") + key + "'");
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  std::vector<double> means = parse_real_list(take("means"));
  std::vector<double> stds = parse_real_list(take("stds"));
  PriorVector source(parse_real_list(take("source_prior")), PriorRole::kSource);
  const std::string target_text = take("target_prior");
  PriorVector target = target_text == "uniform"
                           ? PriorVector::uniform(means.size(), PriorRole::kTarget)
                           : PriorVector(parse_real_list(target_text), PriorRole::kTarget);
  GaussianTaskSpec spec{std::move(means), std::move(stds), std::move(source), std::move(target)};
  for (auto [key, field] : {std::pair{"n_train", &spec.n_train}, std::pair{"n_val", &spec.n_val},
                            std::pair{"n_test", &spec.n_test}}) {
    if (auto it = kv.find(key); it != kv.end()) {
      const double v = parse_real_list(it->second).at(0);
      if (!(v >= 0.0) || v != std::floor(v)) {
        throw ValidationError(std::string("task spec: ") + key + " must be a count");
      }
      *field = static_cast<std::size_t>(v);
      kv.erase(it);
    }
  }
  if (!kv.empty()) throw ValidationError("task spec: unknown key '" + kv.begin()->first + "'");
  spec.validate();
  return spec;
}

GaussianTaskSpec load_task_spec(const std::filesystem::path& path) {
  return parse_task_spec(read_file(path));
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

std::vector<double> exact_posterior(const GaussianTaskSpec& spec, double x,
                                    const PriorVector& priors) {
  std::vector<double> out(spec.n_classes());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = log_density(x, spec.means[k], spec.stds[k]) + std::log(priors[k]);
  }
  exp_normalize(out, out);
  return out;
}

DecisionRule DecisionRule::threshold(double t, std::uint32_t below, std::uint32_t above) {
  if (std::isnan(t)) throw ValidationError("decision rule: threshold is NaN");
  DecisionRule r;
  r.is_threshold_ = true;
  r.threshold_ = t;
  r.below_ = below;
  r.above_ = above;
  return r;
}

DecisionRule DecisionRule::weighted_argmax(std::vector<double> weights) {
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("decision rule: bad class weight");
  }
  DecisionRule r;
  r.is_threshold_ = false;
  r.weights_ = std::move(weights);
  return r;
}

std::uint32_t DecisionRule::predict(const GaussianTaskSpec& spec, double x) const {
  if (is_threshold_) return x <= threshold_ ? below_ : above_;
  std::size_t best = 0;
  double best_score = -kInf;
  for (std::size_t k = 0; k < spec.n_classes(); ++k) {
    const double score = log_density(x, spec.means[k], spec.stds[k]) +
                         std::log(spec.source_prior[k]) + std::log(weights_[k]);
    if (score > best_score) {
      best_score = score;
      best = k;
    }
  }
  return static_cast<std::uint32_t>(best);
}

DecisionRule rebalanced_rule(const GaussianTaskSpec& spec) {
  spec.validate();
  std::vector<double> w(spec.n_classes());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = spec.target_prior[k] / spec.source_prior[k];
  return weighted_rule(spec, std::move(w));
}

DecisionRule source_rule(const GaussianTaskSpec& spec) {
  spec.validate();
  return weighted_rule(spec, std::vector<double>(spec.n_classes(), 1.0));
}

double risk(const DecisionRule& rule, const GaussianTaskSpec& spec, const PriorVector& priors) {
  if (!rule.is_threshold() || spec.n_classes() != 2) {
    throw ValidationError("exact risk needs a two-class threshold rule; use monte_carlo_risk");
  }
  if (priors.size() != 2) throw ValidationError("risk: prior must have two classes");
  const double t = rule.threshold_value();
  double correct = 0.0;
  for (std::uint32_t k = 0; k < 2; ++k) {
    const double below = normal_cdf((t - spec.means[k]) / spec.stds[k]);
    double hit = 0.0;
    if (rule.below() == k) hit += below;
    if (rule.above() == k) hit += 1.0 - below;
    correct += priors[k] * hit;
  }
  return 1.0 - correct;
}

ThresholdSweep threshold_sweep(const GaussianTaskSpec& spec, const PriorVector& priors,
                               double resolution) {
  spec.validate();
  if (spec.n_classes() != 2) throw ValidationError("threshold sweep: two classes only");
  if (!(resolution > 0.0)) throw ValidationError("threshold sweep: resolution must be positive");
  const double max_std = std::max(spec.stds[0], spec.stds[1]);
  const double lo = std::min(spec.means[0], spec.means[1]) - 8.0 * max_std;
  const double hi = std::max(spec.means[0], spec.means[1]) + 8.0 * max_std;
  const std::uint32_t low_class = spec.means[0] <= spec.means[1] ? 0 : 1;

  ThresholdSweep out;
  out.best_risk = kInf;
  auto consider = [&](double t, std::uint32_t below) {
    const double r = risk(DecisionRule::threshold(t, below, 1 - below), spec, priors);
    if (r < out.best_risk) {
      out.best_risk = r;
      out.best_threshold = t;
      out.best_below = below;
    }
    return r;
  };
  const auto steps = static_cast<std::size_t>(std::ceil((hi - lo) / resolution));
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = lo + static_cast<double>(i) * resolution;
    out.curve.emplace_back(t, consider(t, low_class));
    consider(t, 1 - low_class);
  }
  // Constant rules.
  consider(kInf, 0);
  consider(kInf, 1);
  return out;
}

Sample sample(const GaussianTaskSpec& spec, const PriorVector& priors, std::size_t n,
              std::uint64_t seed) {
  spec.validate();
  if (priors.size() != spec.n_classes()) throw ValidationError("sample: prior length mismatch");
  std::mt19937_64 gen(seed);
  std::discrete_distribution<std::uint32_t> pick(priors.values().begin(), priors.values().end());
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> x(n);
  std::vector<std::uint32_t> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = pick(gen);
    x[i] = spec.means[y[i]] + spec.stds[y[i]] * noise(gen);
  }
  return {std::move(x), LabelVector(std::move(y), spec.n_classes())};
}

double empirical_risk(const DecisionRule& rule, const GaussianTaskSpec& spec, const Sample& data) {
  if (data.features.empty()) throw ValidationError("empirical risk: no samples");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < data.features.size(); ++i) {
    if (rule.predict(spec, data.features[i]) != data.labels[i]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(data.features.size());
}

double monte_carlo_risk(const DecisionRule& rule, const GaussianTaskSpec& spec,
                        const PriorVector& priors, std::size_t n, std::uint64_t seed) {
  return empirical_risk(rule, spec, sample(spec, priors, n, seed));
}

OracleReport run_oracle(const GaussianTaskSpec& spec, double resolution, std::uint64_t seed) {
  spec.validate();
  if (spec.n_classes() != 2) throw ValidationError("oracle: two-class specs only");
  const DecisionRule rebalanced = rebalanced_rule(spec);
  const DecisionRule plain = source_rule(spec);
  if (!rebalanced.is_threshold()) {
    throw ValidationError("oracle: exact risks need equal class variances");
  }
  OracleReport r;
  r.rebalanced_threshold = rebalanced.threshold_value();
  r.source_threshold = plain.threshold_value();
  r.rebalanced_risk = risk(rebalanced, spec, spec.target_prior);
  r.source_risk = risk(plain, spec, spec.target_prior);
  auto sweep = threshold_sweep(spec, spec.target_prior, resolution);
  r.sweep_best_threshold = sweep.best_threshold;
  r.sweep_best_risk = sweep.best_risk;
  r.sweep_resolution = resolution;
  r.certificate_holds = r.rebalanced_risk <= sweep.best_risk + 1e-12;
  r.risk_curve = std::move(sweep.curve);
  if (spec.n_test > 0) {
    const Sample test = sample(spec, spec.target_prior, spec.n_test, seed);
    r.empirical_samples = spec.n_test;
    r.empirical_rebalanced_risk = empirical_risk(rebalanced, spec, test);
    r.empirical_source_risk = empirical_risk(plain, spec, test);
  }
  return r;
}

std::string to_json(const OracleReport& report) {
  nlohmann::ordered_json j;
  j["rules"] = nlohmann::ordered_json::array(
      {{{"rule", "rebalanced"},
        {"threshold", json_number(report.rebalanced_threshold)},
        {"risk", report.rebalanced_risk},
        {"empirical_risk", report.empirical_rebalanced_risk}},
       {{"rule", "source"},
        {"threshold", json_number(report.source_threshold)},
        {"risk", report.source_risk},
        {"empirical_risk", report.empirical_source_risk}}});
  j["sweep"] = {{"resolution", report.sweep_resolution},
                {"best_threshold", json_number(report.sweep_best_threshold)},
                {"best_risk", report.sweep_best_risk}};
  j["empirical_samples"] = report.empirical_samples;
  j["certificate_holds"] = report.certificate_holds;
  return j.dump(2);
}

std::string risk_curve_csv(const OracleReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "threshold,risk\n";
  for (const auto& [t, r] : report.risk_curve) os << t << ',' << r << '\n';
  return os.str();
}

}  // namespace imbcal
