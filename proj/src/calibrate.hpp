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
#ifndef IMBCAL_CALIBRATE_HPP_
#define IMBCAL_CALIBRATE_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "core.hpp"

namespace imbcal {

// Logit multiplier: one delta for every row, or one per sample. Values are
// strictly positive and finite.
class TemperatureSpec {
 public:
  static TemperatureSpec scalar(double delta);
  static TemperatureSpec per_sample(std::vector<double> deltas);

  bool is_scalar() const noexcept { return scalar_; }
  std::size_t size() const noexcept { return values_.size(); }
  double at(std::size_t row) const { return scalar_ ? values_[0] : values_[row]; }

 private:
  TemperatureSpec(std::vector<double> values, bool scalar);

  std::vector<double> values_;
  bool scalar_;
};

// P_r(y|x) proportional to P_d(y|x) * P_t(y) / P_s(y).
void rebalance_row(std::span<const double> p_d, const PriorVector& p_s,
                   const PriorVector& p_t, double epsilon, std::span<double> out);
PosteriorMatrix rebalance(const PosteriorMatrix& p_d, const PriorVector& p_s,
                          const PriorVector& p_t, double epsilon = kDefaultEpsilon);

// Geometric interpolation P_d^(1-lambda) * P_r^lambda / Z(x), evaluated in
// log space. This is the minimizer of kl_objective over the simplex.
void interpolate_row(std::span<const double> p_d, std::span<const double> p_r,
                     double lambda, double epsilon, std::span<double> out);
PosteriorMatrix interpolate(const PosteriorMatrix& p_d, const PosteriorMatrix& p_r,
                            double lambda, double epsilon = kDefaultEpsilon);

// rebalance followed by interpolate with cfg.lambda.
PosteriorMatrix calibrate(const PosteriorMatrix& p_d, const PriorVector& p_s,
                          const PriorVector& p_t, const CalibrationConfig& cfg);

// KL(p || q) with q floored at epsilon; 0 * log 0 is taken as 0.
double kl_divergence(std::span<const double> p, std::span<const double> q,
                     double epsilon = kDefaultEpsilon);

// (1 - lambda) * KL(p_f, p_d) + lambda * KL(p_f, p_r).
double kl_objective(std::span<const double> p_f, std::span<const double> p_d,
                    std::span<const double> p_r, double lambda,
                    double epsilon = kDefaultEpsilon);

// p_f[i] / p_f[j] read off a calibrated row.
double odd_ratio(std::span<const double> p_f, std::size_t i, std::size_t j);

// The same ratio from its factorized form:
//   (P_d(i)/P_d(j)) * (P_s(j)/P_s(i))^lambda * (P_t(i)/P_t(j))^lambda
double odd_ratio_predicted(std::span<const double> p_d, const PriorVector& p_s,
                           const PriorVector& p_t, double lambda, std::size_t i,
                           std::size_t j, double epsilon = kDefaultEpsilon);

// softmax(logits * delta), row-wise delta.
PosteriorMatrix temperature_scale(const LogitMatrix& logits,
                                  const TemperatureSpec& delta);

}  // namespace imbcal

#endif  // IMBCAL_CALIBRATE_HPP_
