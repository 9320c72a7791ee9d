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
#include "calibrate.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "error.hpp"

namespace imbcal {
namespace {

void check_prior_shape(const PosteriorMatrix& p, const PriorVector& prior,
                       const char* name) {
  if (prior.size() != p.n_classes()) {
    throw ValidationError(std::string(name) + " has " + std::to_string(prior.size()) +
                          " classes, posteriors have " +
                          std::to_string(p.n_classes()));
  }
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ValidationError("lambda must be a finite value >= 0");
  }
}

}  // namespace

TemperatureSpec::TemperatureSpec(std::vector<double> values, bool scalar)
    : values_(std::move(values)), scalar_(scalar) {
  if (values_.empty()) throw ValidationError("temperature: no delta values");
  for (double d : values_) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw ValidationError("temperature: delta must be positive and finite");
    }
  }
}

TemperatureSpec TemperatureSpec::scalar(double delta) { return {{delta}, true}; }

TemperatureSpec TemperatureSpec::per_sample(std::vector<double> deltas) {
  return {std::move(deltas), false};
}

void rebalance_row(std::span<const double> p_d, const PriorVector& p_s,
                   const PriorVector& p_t, double epsilon, std::span<double> out) {
  floored_log(p_d, epsilon, out);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] += std::log(p_t[k]) - std::log(p_s[k]);
  }
  exp_normalize(out, out);
}

PosteriorMatrix rebalance(const PosteriorMatrix& p_d, const PriorVector& p_s,
                          const PriorVector& p_t, double epsilon) {
  check_prior_shape(p_d, p_s, "source prior");
  check_prior_shape(p_d, p_t, "target prior");
  for (double v : p_s.values()) {
    if (!(v > 0.0)) throw ValidationError("source prior has a zero entry");
  }
  Matrix out(p_d.n_samples(), p_d.n_classes());
  for (std::size_t r = 0; r < p_d.n_samples(); ++r) {
    rebalance_row(p_d.row(r), p_s, p_t, epsilon, out.row(r));
  }
  return PosteriorMatrix(std::move(out), PosteriorRole::kRebalanced);
}

void interpolate_row(std::span<const double> p_d, std::span<const double> p_r,
                     double lambda, double epsilon, std::span<double> out) {
  std::vector<double> log_r(p_r.size());
  floored_log(p_d, epsilon, out);
  floored_log(p_r, epsilon, log_r);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = (1.0 - lambda) * out[k] + lambda * log_r[k];
  }
  exp_normalize(out, out);
}

PosteriorMatrix interpolate(const PosteriorMatrix& p_d, const PosteriorMatrix& p_r,
                            double lambda, double epsilon) {
  check_lambda(lambda);
  if (p_d.n_samples() != p_r.n_samples() || p_d.n_classes() != p_r.n_classes()) {
    throw ValidationError("interpolate: posterior shapes differ");
  }
  Matrix out(p_d.n_samples(), p_d.n_classes());
  for (std::size_t r = 0; r < p_d.n_samples(); ++r) {
    interpolate_row(p_d.row(r), p_r.row(r), lambda, epsilon, out.row(r));
  }
  return PosteriorMatrix(std::move(out), PosteriorRole::kCalibrated);
}

PosteriorMatrix calibrate(const PosteriorMatrix& p_d, const PriorVector& p_s,
                          const PriorVector& p_t, const CalibrationConfig& cfg) {
  cfg.validate();
  return interpolate(p_d, rebalance(p_d, p_s, p_t, cfg.epsilon), cfg.lambda,
                     cfg.epsilon);
}

double kl_divergence(std::span<const double> p, std::span<const double> q,
                     double epsilon) {
  if (p.size() != q.size()) throw ValidationError("kl: rows differ in length");
  std::vector<double> log_q(q.size());
  floored_log(q, epsilon, log_q);
  double kl = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] > 0.0) kl += p[k] * (std::log(p[k]) - log_q[k]);
  }
  return kl;
}

double kl_objective(std::span<const double> p_f, std::span<const double> p_d,
                    std::span<const double> p_r, double lambda, double epsilon) {
  return (1.0 - lambda) * kl_divergence(p_f, p_d, epsilon) +
         lambda * kl_divergence(p_f, p_r, epsilon);
}

double odd_ratio(std::span<const double> p_f, std::size_t i, std::size_t j) {
  if (i >= p_f.size() || j >= p_f.size()) throw ValidationError("odd ratio: class out of range");
  return p_f[i] / p_f[j];
}

double odd_ratio_predicted(std::span<const double> p_d, const PriorVector& p_s,
                           const PriorVector& p_t, double lambda, std::size_t i,
                           std::size_t j, double epsilon) {
  if (i >= p_d.size() || j >= p_d.size()) throw ValidationError("odd ratio: class out of range");
  std::vector<double> log_d(p_d.size());
  floored_log(p_d, epsilon, log_d);
  const double log_ratio = log_d[i] - log_d[j] +
                           lambda * (std::log(p_s[j]) - std::log(p_s[i])) +
                           lambda * (std::log(p_t[i]) - std::log(p_t[j]));
  return std::exp(log_ratio);
}

PosteriorMatrix temperature_scale(const LogitMatrix& logits, const TemperatureSpec& delta) {
  if (!delta.is_scalar() && delta.size() != logits.n_samples()) {
    throw ValidationError("temperature: " + std::to_string(delta.size()) +
                          " deltas for " + std::to_string(logits.n_samples()) + " samples");
  }
  Matrix out(logits.n_samples(), logits.n_classes());
  for (std::size_t r = 0; r < logits.n_samples(); ++r) {
    auto src = logits.row(r);
    auto dst = out.row(r);
    const double d = delta.at(r);
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] = src[k] * d;
    exp_normalize(dst, dst);
  }
  return PosteriorMatrix(std::move(out), PosteriorRole::kDiscriminative);
}

}  // namespace imbcal
