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
#include "metrics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "error.hpp"

namespace imbcal {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double ratio_or_nan(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? kNaN : static_cast<double>(num) / static_cast<double>(den);
}

double mean_defined(const std::vector<double>& v) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double x : v) {
    if (!std::isnan(x)) {
      sum += x;
      ++n;
    }
  }
  if (n == 0) throw ValidationError("metric undefined: no class has support");
  return sum / static_cast<double>(n);
}

nlohmann::json vector_json(const std::vector<double>& v) {
  auto out = nlohmann::json::array();
  for (double x : v) {
    if (std::isnan(x)) {
      out.push_back(nullptr);
    } else {
      out.push_back(x);
    }
  }
  return out;
}

void append_csv(std::ostringstream& os, double x) {
  os << ',';
  if (!std::isnan(x)) os << x;
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::size_t n_classes)
    : n_classes_(n_classes), counts_(n_classes * n_classes, 0) {
  if (n_classes < 2) throw ValidationError("confusion matrix needs at least two classes");
}

void ConfusionMatrix::add(std::size_t truth, std::size_t pred, std::uint64_t count) {
  if (truth >= n_classes_ || pred >= n_classes_) {
    throw ValidationError("confusion matrix index out of range");
  }
  counts_[truth * n_classes_ + pred] += count;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t n = 0;
  for (auto c : counts_) n += c;
  return n;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t truth) const {
  std::uint64_t n = 0;
  for (std::size_t p = 0; p < n_classes_; ++p) n += (*this)(truth, p);
  return n;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t pred) const {
  std::uint64_t n = 0;
  for (std::size_t t = 0; t < n_classes_; ++t) n += (*this)(t, pred);
  return n;
}

ConfusionMatrix confusion(const LabelVector& preds, const LabelVector& labels) {
  if (preds.size() != labels.size()) {
    throw ValidationError("confusion: " + std::to_string(preds.size()) +
                          " predictions vs " + std::to_string(labels.size()) + " labels");
  }
  if (labels.empty()) throw ValidationError("confusion: empty inputs");
  if (preds.n_classes() != labels.n_classes()) {
    throw ValidationError("confusion: class counts differ");
  }
  ConfusionMatrix cm(labels.n_classes());
  for (std::size_t i = 0; i < labels.size(); ++i) cm.add(labels[i], preds[i]);
  return cm;
}

double accuracy(const ConfusionMatrix& cm) {
  const std::uint64_t n = cm.total();
  if (n == 0) throw ValidationError("accuracy: empty confusion matrix");
  std::uint64_t hits = 0;
  for (std::size_t k = 0; k < cm.n_classes(); ++k) hits += cm(k, k);
  return static_cast<double>(hits) / static_cast<double>(n);
}

std::vector<double> per_class_recall(const ConfusionMatrix& cm) {
  std::vector<double> out(cm.n_classes());
  for (std::size_t k = 0; k < cm.n_classes(); ++k) out[k] = ratio_or_nan(cm(k, k), cm.row_sum(k));
  return out;
}

std::vector<double> per_class_precision(const ConfusionMatrix& cm) {
  std::vector<double> out(cm.n_classes());
  for (std::size_t k = 0; k < cm.n_classes(); ++k) out[k] = ratio_or_nan(cm(k, k), cm.col_sum(k));
  return out;
}

double mean_accuracy(const ConfusionMatrix& cm) { return mean_defined(per_class_recall(cm)); }

IouResult iou(const ConfusionMatrix& cm) {
  IouResult out;
  out.per_class.resize(cm.n_classes());
  for (std::size_t k = 0; k < cm.n_classes(); ++k) {
    const std::uint64_t tp = cm(k, k);
    out.per_class[k] = ratio_or_nan(tp, cm.row_sum(k) + cm.col_sum(k) - tp);
  }
  out.mean = mean_defined(out.per_class);
  return out;
}

Decomposition decomposition_check(const LabelVector& preds, const LabelVector& labels) {
  if (preds.size() != labels.size() || labels.empty()) {
    throw ValidationError("decomposition: need equal-length, non-empty inputs");
  }
  const std::size_t k_classes = labels.n_classes();
  std::vector<std::uint64_t> support(k_classes, 0), hits(k_classes, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ++support[labels[i]];
    if (preds[i] == labels[i]) ++hits[labels[i]];
  }
  const double n = static_cast<double>(labels.size());
  std::size_t supported = 0;
  for (auto s : support) supported += s > 0 ? 1 : 0;

  Decomposition d{0.0, 0.0};
  for (std::size_t k = 0; k < k_classes; ++k) {
    if (support[k] == 0) continue;
    const double recall = static_cast<double>(hits[k]) / static_cast<double>(support[k]);
    d.weighted_recall += (static_cast<double>(support[k]) / n) * recall;
    d.uniform_recall += recall / static_cast<double>(supported);
  }
  return d;
}

const char* to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::kAccuracy: return "accuracy";
    case MetricKind::kMeanAccuracy: return "mean_accuracy";
    case MetricKind::kMeanIou: return "mean_iou";
  }
  return "unknown";
}

MetricKind metric_from_string(const std::string& name) {
  if (name == "accuracy") return MetricKind::kAccuracy;
  if (name == "mean_accuracy") return MetricKind::kMeanAccuracy;
  if (name == "mean_iou") return MetricKind::kMeanIou;
  throw ValidationError("unknown metric '" + name + "'");
}

double EvalReport::metric(MetricKind kind) const {
  switch (kind) {
    case MetricKind::kAccuracy: return accuracy;
    case MetricKind::kMeanAccuracy: return mean_accuracy;
    case MetricKind::kMeanIou: return mean_iou;
  }
  return accuracy;
}

EvalReport evaluate(const ConfusionMatrix& cm) {
  EvalReport r;
  r.accuracy = accuracy(cm);
  r.mean_accuracy = mean_accuracy(cm);
  auto ious = iou(cm);
  r.mean_iou = ious.mean;
  r.per_class_iou = std::move(ious.per_class);
  r.per_class_recall = per_class_recall(cm);
  r.per_class_precision = per_class_precision(cm);
  return r;
}

EvalReport evaluate(const PosteriorMatrix& p, const LabelVector& labels) {
  return evaluate(confusion(argmax_row(p), labels));
}

std::string to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["accuracy"] = report.accuracy;
  j["mean_accuracy"] = report.mean_accuracy;
  j["mean_iou"] = report.mean_iou;
  j["per_class_recall"] = vector_json(report.per_class_recall);
  j["per_class_iou"] = vector_json(report.per_class_iou);
  j["per_class_precision"] = vector_json(report.per_class_precision);
  return j.dump(2);
}

std::string csv_header(std::size_t n_classes) {
  std::ostringstream os;
  os << "accuracy,mean_accuracy,mean_iou";
  for (const char* prefix : {"recall_", "iou_", "precision_"}) {
    for (std::size_t k = 0; k < n_classes; ++k) os << ',' << prefix << k;
  }
  return os.str();
}

std::string csv_row(const EvalReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << report.accuracy << ',' << report.mean_accuracy << ',' << report.mean_iou;
  for (double x : report.per_class_recall) append_csv(os, x);
  for (double x : report.per_class_iou) append_csv(os, x);
  for (double x : report.per_class_precision) append_csv(os, x);
  return os.str();
}

}  // namespace imbcal
