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
#ifndef IMBCAL_TOYTRAIN_HPP_
#define IMBCAL_TOYTRAIN_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core.hpp"
#include "metrics.hpp"
#include "search.hpp"

namespace imbcal {

enum class ToyShape { kTwoMoons, kCircle };

const char* to_string(ToyShape shape);
ToyShape toy_shape_from_string(const std::string& name);

// Class 0 is the majority class. The minority class gets
// round(majority_size / imbalance_ratio) points.
struct ToyDatasetSpec {
  ToyShape shape = ToyShape::kTwoMoons;
  std::size_t majority_size = 2500;
  double imbalance_ratio = 9.0;
  double noise = 0.1;
  std::uint64_t seed = 0;
  double val_fraction = 0.2;
  double test_fraction = 0.2;

  std::size_t minority_size() const;
  void validate() const;
};

struct ToyData {
  Matrix features;  // N x 2
  LabelVector labels;
};

ToyData generate(const ToyDatasetSpec& spec);

struct ToySplits {
  ToyData train;
  ToyData val;
  ToyData test;
};

// Per-class shuffled split: the first val_fraction of each class goes to
// validation, the next test_fraction to test, the remainder to training.
ToySplits stratified_split(const ToyData& data, double val_fraction, double test_fraction,
                           std::uint64_t seed);

// Fully connected network, tanh between layers, softmax output. All weights
// and biases live in one flat parameter vector, layer by layer (W row-major
// [out][in], then b).
class MlpModel {
 public:
  MlpModel(std::vector<std::size_t> layer_sizes, std::uint64_t seed);

  const std::vector<std::size_t>& layer_sizes() const noexcept { return sizes_; }
  std::size_t n_inputs() const noexcept { return sizes_.front(); }
  std::size_t n_classes() const noexcept { return sizes_.back(); }

  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }

  LogitMatrix logits(const Matrix& x) const;
  PosteriorMatrix predict(const Matrix& x) const;

  // Mean softmax cross-entropy; writes d loss / d params into `grad`.
  double loss_and_gradient(const Matrix& x, const LabelVector& y, std::span<double> grad) const;
  double loss(const Matrix& x, const LabelVector& y) const;

 private:
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + sizes_[layer] * sizes_[layer + 1];
  }
  // Returns per-layer activations; the last entry holds the logits.
  std::vector<Matrix> forward(const Matrix& x) const;

  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

struct TrainConfig {
  std::size_t epochs = 2000;
  double learning_rate = 0.05;
};

struct TrainResult {
  MlpModel model;
  std::vector<double> loss_history;  // loss before each update
};

// Full-batch gradient descent. Throws NumericError if the loss diverges.
TrainResult train(MlpModel model, const ToyData& data, const TrainConfig& cfg);

struct GridBounds {
  double x_min = -2.0;
  double x_max = 2.0;
  double y_min = -2.0;
  double y_max = 2.0;
};

// Data extent padded by `margin` on every side.
GridBounds bounds_of(const Matrix& features, double margin = 0.5);

struct BoundaryCalibration {
  PriorVector source;
  PriorVector target;
  double lambda;
};

// Predicted labels on a resolution x resolution lattice of cell centres,
// stored row-major with y as the slow axis.
struct BoundaryGrid {
  GridBounds bounds;
  std::size_t resolution = 0;
  std::vector<std::uint32_t> labels;

  std::size_t count(std::uint32_t label) const;
  double x_at(std::size_t ix) const;
  double y_at(std::size_t iy) const;
};

BoundaryGrid boundary_grid(const MlpModel& model, const GridBounds& bounds,
                           std::size_t resolution,
                           const std::optional<BoundaryCalibration>& calib = std::nullopt);

struct LambdaCurve {
  std::vector<CurvePoint> curve;  // full grid
  double grid_lambda = 0.0;
  SearchResult search;
  bool unimodal = false;
  // Searched lambda, or the grid lambda when the curve is not unimodal.
  double best_lambda = 0.0;
  bool fell_back_to_grid = false;
};

LambdaCurve lambda_curve(const MlpModel& model, const ToyData& val, const PriorVector& source,
                         const PriorVector& target, const SearchConfig& cfg, MetricKind metric);

struct ToyExperimentConfig {
  ToyDatasetSpec data;
  std::vector<std::size_t> layer_sizes = {2, 32, 32, 2};
  TrainConfig train;
  SearchConfig search;
  MetricKind metric = MetricKind::kMeanAccuracy;
  std::size_t grid_resolution = 100;
};

struct ToyExperiment {
  ToyData data;
  ToySplits splits;
  TrainResult trained;
  PriorVector source_prior;
  PriorVector target_prior;
  LambdaCurve curve;
  double test_metric_at_zero = 0.0;
  double test_metric_at_best = 0.0;
  EvalReport test_report_at_zero;
  EvalReport test_report_at_best;
  BoundaryGrid grid_at_zero;
  BoundaryGrid grid_at_best;
  // Minority-class cell counts for lambda = 0, 0.1, ..., 1.
  std::vector<std::pair<double, std::size_t>> minority_area;
  bool area_monotone = false;
};

// Shape-specific defaults: two moons trains with learning rate 0.2, the
// circle with 0.05.
ToyExperimentConfig toy_defaults(ToyShape shape);

ToyExperiment run_toy_experiment(const ToyExperimentConfig& cfg);

std::string dataset_csv(const ToyExperiment& exp);
std::string boundary_csv(const BoundaryGrid& at_zero, const BoundaryGrid& at_best);
std::string to_json(const ToyExperiment& exp, const ToyExperimentConfig& cfg);
std::string boundary_svg(const ToyExperiment& exp);

}  // namespace imbcal

#endif  // IMBCAL_TOYTRAIN_HPP_
