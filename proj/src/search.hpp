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
#ifndef IMBCAL_SEARCH_HPP_
#define IMBCAL_SEARCH_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace imbcal {

// Search range over the quantized grid lambda_j = low + j * prec.
struct SearchConfig {
  double low = 0.0;
  double high = 2.0;
  double prec = 0.1;
  // Upper bound for the range-expansion loop.
  double max_high = 16.0;

  void validate() const;
  // Grid index of `high` (and of `max_high`), rounded to the nearest step.
  std::int64_t high_index() const;
  std::int64_t max_index() const;
  double lambda_at(std::int64_t index) const { return low + static_cast<double>(index) * prec; }
};

// Higher is better. Must be deterministic in lambda.
using MetricFn = std::function<double(double lambda)>;

struct CurvePoint {
  double lambda;
  double score;
};

// Memoizes a MetricFn on grid indices so each lambda is evaluated at most
// once; keeps the evaluation trace.
class GridEvaluator {
 public:
  GridEvaluator(MetricFn metric, const SearchConfig& cfg);

  double operator()(std::int64_t index);
  std::size_t evaluations() const noexcept { return order_.size(); }
  // Evaluated points in evaluation order.
  std::vector<CurvePoint> trace() const;
  // Evaluated points sorted by lambda.
  std::vector<CurvePoint> sorted_trace() const;
  const SearchConfig& config() const noexcept { return cfg_; }

 private:
  MetricFn metric_;
  SearchConfig cfg_;
  std::map<std::int64_t, double> cache_;
  std::vector<std::int64_t> order_;
};

struct SearchResult {
  double lambda = 0.0;
  double score = 0.0;
  std::size_t evaluations = 0;
  // Grid index of the final upper bound after range expansion.
  std::int64_t final_high_index = 0;
  // Expansion reached max_high while the metric there still matched or beat
  // metric(low); the bracket search then ran over [low, max_high].
  bool hit_cap = false;
  std::vector<CurvePoint> trace;
};

// Modified binary search for the best lambda on a unimodal metric curve.
SearchResult search_lambda(const MetricFn& metric, const SearchConfig& cfg = {});

struct GridResult {
  double lambda = 0.0;
  double score = 0.0;
  std::vector<CurvePoint> curve;
};

// Exhaustive evaluation of every grid point in [low, high]; ties go to the
// lowest lambda.
GridResult grid_search(const MetricFn& metric, const SearchConfig& cfg = {});

// True iff the scores rise (non-strictly) to a peak and then fall
// (non-strictly).
bool unimodality_check(std::span<const double> scores);
bool unimodality_check(std::span<const CurvePoint> curve);

std::string curve_csv(std::span<const CurvePoint> curve);

}  // namespace imbcal

#endif  // IMBCAL_SEARCH_HPP_
