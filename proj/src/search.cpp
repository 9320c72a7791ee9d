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
#include "search.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "error.hpp"

namespace imbcal {
namespace {

std::int64_t to_index(double span, double prec) {
  return static_cast<std::int64_t>(std::llround(span / prec));
}

// Bracket narrowing on grid indices [lo, hi]. Comparisons follow the
// three-point rule: M is returned when it beats its left neighbour and is not
// beaten on the right; the search moves left when M does not beat its left
// neighbour but holds against the right one; otherwise it moves right.
// Equal scores resolve toward the smaller lambda.
std::int64_t find_max(GridEvaluator& m, std::int64_t lo, std::int64_t hi) {
  while (true) {
    if (lo == hi) return lo;
    if (hi == lo + 1) return m(lo) >= m(hi) ? lo : hi;
    const std::int64_t mid = lo + (hi - lo) / 2;
    const double at_mid = m(mid);
    const double left = m(mid - 1);
    const double right = m(mid + 1);
    if (at_mid > left && at_mid >= right) return mid;
    if (at_mid <= left && at_mid >= right) {
      hi = mid - 1;
    } else {
      lo = mid + 1;
    }
  }
}

}  // namespace

void SearchConfig::validate() const {
  if (!std::isfinite(low) || !std::isfinite(high) || !std::isfinite(prec) ||
      !std::isfinite(max_high)) {
    throw ValidationError("search: bounds must be finite");
  }
  if (!(prec > 0.0)) throw ValidationError("search: prec must be positive");
  if (!(low < high)) throw ValidationError("search: low must be below high");
  if (max_high < high) throw ValidationError("search: max_high must be >= high");
  const double steps = (high - low) / prec;
  if (std::abs(steps - std::round(steps)) > 1e-6) {
    throw ValidationError("search: (high - low) is not a multiple of prec");
  }
}

std::int64_t SearchConfig::high_index() const { return to_index(high - low, prec); }

std::int64_t SearchConfig::max_index() const {
  // Floor so the cap never exceeds max_high.
  return static_cast<std::int64_t>(std::floor((max_high - low) / prec + 1e-9));
}

GridEvaluator::GridEvaluator(MetricFn metric, const SearchConfig& cfg)
    : metric_(std::move(metric)), cfg_(cfg) {}

double GridEvaluator::operator()(std::int64_t index) {
  if (auto it = cache_.find(index); it != cache_.end()) return it->second;
  const double lambda = cfg_.lambda_at(index);
  const double score = metric_(lambda);
  if (!std::isfinite(score)) {
    throw NumericError("metric returned a non-finite value at lambda " + std::to_string(lambda));
  }
  cache_.emplace(index, score);
  order_.push_back(index);
  return score;
}

std::vector<CurvePoint> GridEvaluator::trace() const {
  std::vector<CurvePoint> out;
  out.reserve(order_.size());
  for (auto idx : order_) out.push_back({cfg_.lambda_at(idx), cache_.at(idx)});
  return out;
}

std::vector<CurvePoint> GridEvaluator::sorted_trace() const {
  std::vector<CurvePoint> out;
  out.reserve(cache_.size());
  for (const auto& [idx, score] : cache_) out.push_back({cfg_.lambda_at(idx), score});
  return out;
}

SearchResult search_lambda(const MetricFn& metric, const SearchConfig& cfg) {
  cfg.validate();
  GridEvaluator m(metric, cfg);
  SearchResult result;

  std::int64_t best = 0;
  std::int64_t high = cfg.high_index();
  if (m(1) < m(0)) {
    best = 0;
  } else {
    const std::int64_t cap = cfg.max_index();
    while (m(high) >= m(0)) {
      if (high >= cap) {
        result.hit_cap = true;
        break;
      }
      high = std::min(high + 5, cap);
    }
    best = find_max(m, 0, high);
  }

  result.lambda = cfg.lambda_at(best);
  result.score = m(best);
  result.evaluations = m.evaluations();
  result.final_high_index = high;
  result.trace = m.trace();
  return result;
}

GridResult grid_search(const MetricFn& metric, const SearchConfig& cfg) {
  cfg.validate();
  GridResult result;
  const std::int64_t n = cfg.high_index();
  std::int64_t best = -1;
  for (std::int64_t j = 0; j <= n; ++j) {
    const double lambda = cfg.lambda_at(j);
    const double score = metric(lambda);
    if (!std::isfinite(score)) {
      throw NumericError("metric returned a non-finite value at lambda " + std::to_string(lambda));
    }
    result.curve.push_back({lambda, score});
    if (best < 0 || score > result.score) {
      best = j;
      result.score = score;
      result.lambda = lambda;
    }
  }
  return result;
}

bool unimodality_check(std::span<const double> scores) {
  std::size_t i = 1;
  while (i < scores.size() && scores[i] >= scores[i - 1]) ++i;
  while (i < scores.size() && scores[i] <= scores[i - 1]) ++i;
  return i >= scores.size();
}

bool unimodality_check(std::span<const CurvePoint> curve) {
  std::vector<double> scores;
  scores.reserve(curve.size());
  for (const auto& p : curve) scores.push_back(p.score);
  return unimodality_check(scores);
}

std::string curve_csv(std::span<const CurvePoint> curve) {
  std::ostringstream os;
  os.precision(17);
  os << "lambda,score\n";
  for (const auto& p : curve) os << p.lambda << ',' << p.score << '\n';
  return os.str();
}

}  // namespace imbcal
