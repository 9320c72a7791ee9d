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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "error.hpp"

namespace imbcal {
namespace {

void check_row_stochastic(const Matrix& m, const char* what) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double sum = 0.0;
    for (double v : m.row(r)) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ValidationError(std::string(what) + ": entry outside [0, 1] in row " +
                              std::to_string(r));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw ValidationError(std::string(what) + ": row " + std::to_string(r) +
                            " sums to " + std::to_string(sum));
    }
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw ValidationError("matrix payload has " + std::to_string(values_.size()) +
                          " values, expected " + std::to_string(rows * cols));
  }
}

LogitMatrix::LogitMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1) throw ValidationError("logits: need at least one sample");
  if (values_.cols() < 2) throw ValidationError("logits: need at least two classes");
  for (double v : values_.values()) {
    if (!std::isfinite(v)) throw ValidationError("logits: non-finite entry");
  }
}

const char* to_string(PosteriorRole role) {
  switch (role) {
    case PosteriorRole::kDiscriminative: return "discriminative";
    case PosteriorRole::kRebalanced: return "rebalanced";
    case PosteriorRole::kCalibrated: return "calibrated";
    case PosteriorRole::kFused: return "fused";
  }
  return "unknown";
}

PosteriorMatrix::PosteriorMatrix(Matrix values, PosteriorRole role)
    : values_(std::move(values)), role_(role) {
  if (values_.rows() < 1) throw ValidationError("posteriors: need at least one sample");
  if (values_.cols() < 2) throw ValidationError("posteriors: need at least two classes");
  check_row_stochastic(values_, "posteriors");
}

PriorVector::PriorVector(std::vector<double> values, PriorRole role)
    : values_(std::move(values)), role_(role) {
  if (values_.size() < 2) throw ValidationError("prior: need at least two classes");
  double sum = 0.0;
  for (double v : values_) {
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("prior: entry outside [0, 1]");
    if (role_ == PriorRole::kSource && v <= 0.0) {
      throw ValidationError("source prior: entries must be strictly positive");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kRowSumTolerance) {
    throw ValidationError("prior: entries sum to " + std::to_string(sum));
  }
}

PriorVector PriorVector::uniform(std::size_t n_classes, PriorRole role) {
  if (n_classes < 2) throw ValidationError("prior: need at least two classes");
  return PriorVector(std::vector<double>(n_classes, 1.0 / static_cast<double>(n_classes)),
                     role);
}

LabelVector::LabelVector(std::vector<std::uint32_t> labels, std::size_t n_classes)
    : labels_(std::move(labels)), n_classes_(n_classes) {
  for (std::uint32_t y : labels_) {
    if (y >= n_classes_) {
      throw ValidationError("label " + std::to_string(y) + " out of range for " +
                            std::to_string(n_classes_) + " classes");
    }
  }
}

void CalibrationConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ValidationError("lambda must be a finite value >= 0");
  }
  if (!(epsilon > 0.0 && epsilon <= 1e-6)) {
    throw ValidationError("epsilon must lie in (0, 1e-6]");
  }
}

double log_sum_exp(std::span<const double> x) {
  const double m = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

void floored_log(std::span<const double> p, double epsilon, std::span<double> out) {
  double sum = 0.0;
  for (double v : p) sum += std::max(v, epsilon);
  const double log_sum = std::log(sum);
  for (std::size_t k = 0; k < p.size(); ++k) {
    out[k] = std::log(std::max(p[k], epsilon)) - log_sum;
  }
}

void exp_normalize(std::span<const double> x, std::span<double> out) {
  const double lse = log_sum_exp(x);
  if (!std::isfinite(lse)) throw NumericError("row normalizer is not finite");
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = std::exp(x[k] - lse);
}

PosteriorMatrix softmax(const LogitMatrix& logits) {
  Matrix out(logits.n_samples(), logits.n_classes());
  for (std::size_t r = 0; r < logits.n_samples(); ++r) {
    exp_normalize(logits.row(r), out.row(r));
  }
  return PosteriorMatrix(std::move(out), PosteriorRole::kDiscriminative);
}

PriorVector estimate_source_prior(const LabelVector& labels, std::size_t n_classes,
                                  double epsilon) {
  if (labels.empty()) throw ValidationError("cannot estimate a prior from zero labels");
  if (labels.n_classes() != n_classes) {
    throw ValidationError("label vector class count does not match n_classes");
  }
  std::vector<double> counts(n_classes, 0.0);
  for (std::uint32_t y : labels.values()) counts[y] += 1.0;
  const double n = static_cast<double>(labels.size());
  double total = 0.0;
  for (double& c : counts) {
    c = std::max(c / n, epsilon);
    total += c;
  }
  for (double& c : counts) c /= total;
  return PriorVector(std::move(counts), PriorRole::kSource);
}

std::uint32_t argmax(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < row.size(); ++k) {
    if (row[k] > row[best]) best = k;
  }
  return static_cast<std::uint32_t>(best);
}

LabelVector argmax_row(const PosteriorMatrix& p) {
  std::vector<std::uint32_t> out(p.n_samples());
  for (std::size_t r = 0; r < p.n_samples(); ++r) out[r] = argmax(p.row(r));
  return LabelVector(std::move(out), p.n_classes());
}

}  // namespace imbcal
