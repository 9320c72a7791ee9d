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
#ifndef IMBCAL_METRICS_HPP_
#define IMBCAL_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "core.hpp"

namespace imbcal {

// counts(t, p) = number of samples with true class t predicted as p.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t n_classes);

  std::size_t n_classes() const noexcept { return n_classes_; }
  std::uint64_t operator()(std::size_t truth, std::size_t pred) const {
    return counts_[truth * n_classes_ + pred];
  }
  void add(std::size_t truth, std::size_t pred, std::uint64_t count = 1);

  std::uint64_t total() const;
  std::uint64_t row_sum(std::size_t truth) const;
  std::uint64_t col_sum(std::size_t pred) const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t n_classes_;
  std::vector<std::uint64_t> counts_;
};

ConfusionMatrix confusion(const LabelVector& preds, const LabelVector& labels);

// trace / N.
double accuracy(const ConfusionMatrix& cm);

// Per-class recall averaged over classes with nonzero support.
double mean_accuracy(const ConfusionMatrix& cm);

// Per-class entries are NaN where undefined (zero denominator); the means
// skip those entries.
std::vector<double> per_class_recall(const ConfusionMatrix& cm);
std::vector<double> per_class_precision(const ConfusionMatrix& cm);

struct IouResult {
  std::vector<double> per_class;
  double mean;
};
IouResult iou(const ConfusionMatrix& cm);

// ACC and mACC rebuilt from per-class recalls:
//   weighted = sum_k (N_k / N) * recall_k
//   uniform  = sum_k (1 / K') * recall_k     (K' = classes with support)
struct Decomposition {
  double weighted_recall;
  double uniform_recall;
};
Decomposition decomposition_check(const LabelVector& preds, const LabelVector& labels);

enum class MetricKind { kAccuracy, kMeanAccuracy, kMeanIou };

const char* to_string(MetricKind kind);
MetricKind metric_from_string(const std::string& name);

struct EvalReport {
  double accuracy = 0.0;
  double mean_accuracy = 0.0;
  double mean_iou = 0.0;
  std::vector<double> per_class_recall;
  std::vector<double> per_class_iou;
  std::vector<double> per_class_precision;

  double metric(MetricKind kind) const;
};

EvalReport evaluate(const ConfusionMatrix& cm);
EvalReport evaluate(const PosteriorMatrix& p, const LabelVector& labels);

// JSON document; undefined per-class entries serialize as null.
std::string to_json(const EvalReport& report);
// Stable field order: accuracy, mean_accuracy, mean_iou, recall_*, iou_*,
// precision_*.
std::string csv_header(std::size_t n_classes);
std::string csv_row(const EvalReport& report);

}  // namespace imbcal

#endif  // IMBCAL_METRICS_HPP_
