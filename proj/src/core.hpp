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
#ifndef IMBCAL_CORE_HPP_
#define IMBCAL_CORE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace imbcal {

inline constexpr double kRowSumTolerance = 1e-9;
inline constexpr double kDefaultEpsilon = 1e-12;

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return values_.empty(); }

  double operator()(std::size_t r, std::size_t c) const {
    return values_[r * cols_ + c];
  }
  double& operator()(std::size_t r, std::size_t c) {
    return values_[r * cols_ + c];
  }

  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// Pre-softmax scores. N >= 1, K >= 2, all entries finite.
class LogitMatrix {
 public:
  explicit LogitMatrix(Matrix values);

  const Matrix& values() const noexcept { return values_; }
  std::size_t n_samples() const noexcept { return values_.rows(); }
  std::size_t n_classes() const noexcept { return values_.cols(); }
  std::span<const double> row(std::size_t r) const { return values_.row(r); }

 private:
  Matrix values_;
};

enum class PosteriorRole { kDiscriminative, kRebalanced, kCalibrated, kFused };

const char* to_string(PosteriorRole role);

// Row-stochastic N x K matrix: entries in [0, 1], rows sum to 1 within
// kRowSumTolerance.
class PosteriorMatrix {
 public:
  explicit PosteriorMatrix(Matrix values,
                           PosteriorRole role = PosteriorRole::kDiscriminative);

  const Matrix& values() const noexcept { return values_; }
  std::size_t n_samples() const noexcept { return values_.rows(); }
  std::size_t n_classes() const noexcept { return values_.cols(); }
  std::span<const double> row(std::size_t r) const { return values_.row(r); }
  double operator()(std::size_t r, std::size_t c) const {
    return values_(r, c);
  }
  PosteriorRole role() const noexcept { return role_; }

 private:
  Matrix values_;
  PosteriorRole role_;
};

enum class PriorRole { kSource, kTarget };

// Point on the K-simplex. Source priors must be strictly positive because
// rebalancing divides by them.
class PriorVector {
 public:
  PriorVector(std::vector<double> values, PriorRole role);

  static PriorVector uniform(std::size_t n_classes, PriorRole role);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  PriorRole role() const noexcept { return role_; }

 private:
  std::vector<double> values_;
  PriorRole role_;
};

class LabelVector {
 public:
  LabelVector(std::vector<std::uint32_t> labels, std::size_t n_classes);

  std::span<const std::uint32_t> values() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  std::size_t n_classes() const noexcept { return n_classes_; }
  std::uint32_t operator[](std::size_t i) const { return labels_[i]; }

  bool operator==(const LabelVector&) const = default;

 private:
  std::vector<std::uint32_t> labels_;
  std::size_t n_classes_;
};

enum class TieBreak { kLowestIndex };

struct CalibrationConfig {
  double lambda = 0.0;
  double epsilon = kDefaultEpsilon;
  TieBreak tie_break = TieBreak::kLowestIndex;

  // Throws ValidationError unless lambda >= 0 and epsilon in (0, 1e-6].
  void validate() const;
};

// Max-subtracted softmax.
PosteriorMatrix softmax(const LogitMatrix& logits);

// Empirical class frequencies N_k / N. Empty classes are floored to
// `epsilon` and the vector renormalized so the result is a valid source prior.
PriorVector estimate_source_prior(const LabelVector& labels,
                                  std::size_t n_classes,
                                  double epsilon = kDefaultEpsilon);

// Row-wise argmax; ties go to the lowest class index.
LabelVector argmax_row(const PosteriorMatrix& p);
std::uint32_t argmax(std::span<const double> row);

// Log-space row helpers shared by the transform modules.
double log_sum_exp(std::span<const double> x);
// out[k] = log(max(p[k], eps)) - log(sum_j max(p[j], eps)).
void floored_log(std::span<const double> p, double epsilon,
                 std::span<double> out);
// out[k] = exp(x[k] - logsumexp(x)). `out` may alias `x`.
void exp_normalize(std::span<const double> x, std::span<double> out);

}  // namespace imbcal

#endif  // IMBCAL_CORE_HPP_
