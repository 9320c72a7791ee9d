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
#include "toytrain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "calibrate.hpp"
#include "error.hpp"

namespace imbcal {
namespace {

ToyData subset(const ToyData& data, const std::vector<std::size_t>& rows) {
  Matrix features(rows.size(), data.features.cols());
  std::vector<std::uint32_t> labels(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy_n(data.features.row(rows[i]).begin(), data.features.cols(),
                features.row(i).begin());
    labels[i] = data.labels[rows[i]];
  }
  return {std::move(features), LabelVector(std::move(labels), data.labels.n_classes())};
}

Matrix lattice(const GridBounds& b, std::size_t resolution) {
  BoundaryGrid probe{b, resolution, {}};
  Matrix points(resolution * resolution, 2);
  for (std::size_t iy = 0; iy < resolution; ++iy) {
    for (std::size_t ix = 0; ix < resolution; ++ix) {
      points(iy * resolution + ix, 0) = probe.x_at(ix);
      points(iy * resolution + ix, 1) = probe.y_at(iy);
    }
  }
  return points;
}

}  // namespace

const char* to_string(ToyShape shape) {
  return shape == ToyShape::kTwoMoons ? "two_moons" : "circle";
}

ToyShape toy_shape_from_string(const std::string& name) {
  if (name == "two_moons" || name == "moons") return ToyShape::kTwoMoons;
  if (name == "circle" || name == "circles") return ToyShape::kCircle;
  throw ValidationError("unknown toy shape '" + name + "' (expected two_moons or circle)");
}

std::size_t ToyDatasetSpec::minority_size() const {
  return static_cast<std::size_t>(std::llround(static_cast<double>(majority_size) / imbalance_ratio));
}

void ToyDatasetSpec::validate() const {
  if (!(imbalance_ratio >= 1.0) || !std::isfinite(imbalance_ratio)) {
    throw ValidationError("toy data: imbalance ratio must be >= 1");
  }
  if (majority_size < 1 || minority_size() < 1) throw ValidationError("toy data: class sizes must be >= 1");
  if (!(noise >= 0.0)) throw ValidationError("toy data: noise must be >= 0");
  if (!(val_fraction >= 0.0 && test_fraction >= 0.0 && val_fraction + test_fraction < 1.0)) {
    throw ValidationError("toy data: split fractions must be >= 0 and sum below 1");
  }
}

ToyData generate(const ToyDatasetSpec& spec) {
  spec.validate();
  const std::size_t sizes[2] = {spec.majority_size, spec.minority_size()};
  std::mt19937_64 gen(spec.seed);
  std::normal_distribution<double> noise(0.0, spec.noise > 0.0 ? spec.noise : 1.0);
  const double max_angle = spec.shape == ToyShape::kTwoMoons ? std::numbers::pi : 2.0 * std::numbers::pi;
  std::uniform_real_distribution<double> angle(0.0, max_angle);

  Matrix features(sizes[0] + sizes[1], 2);
  std::vector<std::uint32_t> labels;
  labels.reserve(sizes[0] + sizes[1]);
  std::size_t row = 0;
  for (std::uint32_t cls = 0; cls < 2; ++cls) {
    for (std::size_t i = 0; i < sizes[cls]; ++i, ++row) {
      const double t = angle(gen);
      double x = 0.0, y = 0.0;
      if (spec.shape == ToyShape::kTwoMoons) {
        x = cls == 0 ? std::cos(t) : 1.0 - std::cos(t);
        y = cls == 0 ? std::sin(t) : 0.5 - std::sin(t);
      } else {
        const double radius = cls == 0 ? 1.0 : 0.5;
        x = radius * std::cos(t);
        y = radius * std::sin(t);
      }
      if (spec.noise > 0.0) {
        x += noise(gen);
        y += noise(gen);
      }
      features(row, 0) = x;
      features(row, 1) = y;
      labels.push_back(cls);
    }
  }
  return {std::move(features), LabelVector(std::move(labels), 2)};
}

ToySplits stratified_split(const ToyData& data, double val_fraction, double test_fraction,
                           std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<std::size_t> train, val, test;
  for (std::uint32_t cls = 0; cls < data.labels.n_classes(); ++cls) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < data.labels.size(); ++i) {
      if (data.labels[i] == cls) idx.push_back(i);
    }
    std::shuffle(idx.begin(), idx.end(), gen);
    const auto n = static_cast<double>(idx.size());
    const auto n_val = static_cast<std::size_t>(std::llround(n * val_fraction));
    const auto n_test = static_cast<std::size_t>(std::llround(n * test_fraction));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (i < n_val) {
        val.push_back(idx[i]);
      } else if (i < n_val + n_test) {
        test.push_back(idx[i]);
      } else {
        train.push_back(idx[i]);
      }
    }
  }
  for (auto* part : {&train, &val, &test}) std::sort(part->begin(), part->end());
  return {subset(data, train), subset(data, val), subset(data, test)};
}

MlpModel::MlpModel(std::vector<std::size_t> layer_sizes, std::uint64_t seed)
    : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw ValidationError("mlp: need at least input and output sizes");
  for (auto s : sizes_) {
    if (s == 0) throw ValidationError("mlp: layer sizes must be positive");
  }
  if (sizes_.back() < 2) throw ValidationError("mlp: need at least two output classes");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(total);
    total += sizes_[l] * sizes_[l + 1] + sizes_[l + 1];
  }
  params_.assign(total, 0.0);
  // Glorot-uniform weights, zero biases.
  std::mt19937_64 gen(seed);
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(sizes_[l] + sizes_[l + 1]));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (std::size_t i = 0; i < sizes_[l] * sizes_[l + 1]; ++i) {
      params_[weight_offset(l) + i] = dist(gen);
    }
  }
}

namespace {

// tanh through a single exp call; within a few ulp of std::tanh away from 0.
double fast_tanh(double x) {
  const double t = std::exp(-2.0 * std::abs(x));
  return std::copysign((1.0 - t) / (1.0 + t), x);
}

}  // namespace

std::vector<Matrix> MlpModel::forward(const Matrix& x) const {
  if (x.cols() != n_inputs()) throw ValidationError("mlp: input width mismatch");
  const std::size_t n = x.rows();
  const std::size_t n_layers = sizes_.size() - 1;
  std::vector<Matrix> acts;
  acts.reserve(n_layers + 1);
  acts.push_back(x);
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t in = sizes_[l], out = sizes_[l + 1];
    const double* w = params_.data() + weight_offset(l);
    const double* b = params_.data() + bias_offset(l);
    const Matrix& a = acts.back();
    // Column-major copy of W so the inner loop runs over contiguous outputs.
    std::vector<double> wt(in * out);
    for (std::size_t o = 0; o < out; ++o) {
      for (std::size_t i = 0; i < in; ++i) wt[i * out + o] = w[o * in + i];
    }
    const bool hidden = l + 1 < n_layers;
    Matrix z(n, out);
    for (std::size_t s = 0; s < n; ++s) {
      const double* a_row = a.row(s).data();
      double* z_row = z.row(s).data();
      std::copy(b, b + out, z_row);
      for (std::size_t i = 0; i < in; ++i) {
        const double ai = a_row[i];
        const double* wt_row = wt.data() + i * out;
        for (std::size_t o = 0; o < out; ++o) z_row[o] += ai * wt_row[o];
      }
      if (hidden) {
        for (std::size_t o = 0; o < out; ++o) z_row[o] = fast_tanh(z_row[o]);
      }
    }
    acts.push_back(std::move(z));
  }
  return acts;
}

LogitMatrix MlpModel::logits(const Matrix& x) const { return LogitMatrix(forward(x).back()); }

PosteriorMatrix MlpModel::predict(const Matrix& x) const { return softmax(logits(x)); }

double MlpModel::loss_and_gradient(const Matrix& x, const LabelVector& y,
                                   std::span<double> grad) const {
  if (x.rows() != y.size() || x.rows() == 0) throw ValidationError("mlp: need one label per sample");
  if (grad.size() != params_.size()) throw ValidationError("mlp: gradient buffer size mismatch");
  std::fill(grad.begin(), grad.end(), 0.0);
  const std::size_t n = x.rows();
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<Matrix> acts = forward(x);
  const std::size_t n_layers = sizes_.size() - 1;

  // Softmax cross-entropy: d loss / d logits = (softmax - onehot) / N.
  double loss = 0.0;
  Matrix delta = acts.back();
  for (std::size_t s = 0; s < n; ++s) {
    auto row = delta.row(s);
    const double lse = log_sum_exp(row);
    loss += lse - row[y[s]];
    for (double& v : row) v = std::exp(v - lse) * inv_n;
    row[y[s]] -= inv_n;
  }
  loss *= inv_n;

  for (std::size_t l = n_layers; l-- > 0;) {
    const std::size_t in = sizes_[l], out = sizes_[l + 1];
    const Matrix& a = acts[l];
    double* gw = grad.data() + weight_offset(l);
    double* gb = grad.data() + bias_offset(l);
    for (std::size_t s = 0; s < n; ++s) {
      const double* a_row = a.row(s).data();
      const double* d_row = delta.row(s).data();
      for (std::size_t o = 0; o < out; ++o) {
        gb[o] += d_row[o];
        double* gw_row = gw + o * in;
        for (std::size_t i = 0; i < in; ++i) gw_row[i] += d_row[o] * a_row[i];
      }
    }
    if (l == 0) break;
    const double* w = params_.data() + weight_offset(l);
    Matrix prev(n, in);
    for (std::size_t s = 0; s < n; ++s) {
      const double* d_row = delta.row(s).data();
      double* p_row = prev.row(s).data();
      for (std::size_t o = 0; o < out; ++o) {
        const double* w_row = w + o * in;
        for (std::size_t i = 0; i < in; ++i) p_row[i] += d_row[o] * w_row[i];
      }
      const double* a_row = a.row(s).data();
      for (std::size_t i = 0; i < in; ++i) p_row[i] *= 1.0 - a_row[i] * a_row[i];
    }
    delta = std::move(prev);
  }
  return loss;
}

double MlpModel::loss(const Matrix& x, const LabelVector& y) const {
  if (x.rows() != y.size() || x.rows() == 0) throw ValidationError("mlp: need one label per sample");
  const Matrix z = forward(x).back();
  double loss = 0.0;
  for (std::size_t s = 0; s < z.rows(); ++s) loss += log_sum_exp(z.row(s)) - z(s, y[s]);
  return loss / static_cast<double>(z.rows());
}

TrainResult train(MlpModel model, const ToyData& data, const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) throw ValidationError("train: learning rate must be positive");
  std::vector<double> grad(model.parameters().size());
  std::vector<double> history;
  history.reserve(cfg.epochs);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double loss = model.loss_and_gradient(data.features, data.labels, grad);
    if (!std::isfinite(loss)) {
      throw NumericError("train: loss diverged at epoch " + std::to_string(epoch) +
                         " (last finite loss " +
                         (history.empty() ? std::string("n/a") : std::to_string(history.back())) +
                         ", learning rate " + std::to_string(cfg.learning_rate) + ")");
    }
    history.push_back(loss);
    auto params = model.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= cfg.learning_rate * grad[i];
  }
  return {std::move(model), std::move(history)};
}

GridBounds bounds_of(const Matrix& features, double margin) {
  GridBounds b{features(0, 0), features(0, 0), features(0, 1), features(0, 1)};
  for (std::size_t r = 1; r < features.rows(); ++r) {
    b.x_min = std::min(b.x_min, features(r, 0));
    b.x_max = std::max(b.x_max, features(r, 0));
    b.y_min = std::min(b.y_min, features(r, 1));
    b.y_max = std::max(b.y_max, features(r, 1));
  }
  b.x_min -= margin;
  b.x_max += margin;
  b.y_min -= margin;
  b.y_max += margin;
  return b;
}

std::size_t BoundaryGrid::count(std::uint32_t label) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

double BoundaryGrid::x_at(std::size_t ix) const {
  return bounds.x_min + (static_cast<double>(ix) + 0.5) * (bounds.x_max - bounds.x_min) /
                            static_cast<double>(resolution);
}

double BoundaryGrid::y_at(std::size_t iy) const {
  return bounds.y_min + (static_cast<double>(iy) + 0.5) * (bounds.y_max - bounds.y_min) /
                            static_cast<double>(resolution);
}

BoundaryGrid boundary_grid(const MlpModel& model, const GridBounds& bounds,
                           std::size_t resolution,
                           const std::optional<BoundaryCalibration>& calib) {
  if (resolution == 0) throw ValidationError("boundary grid: resolution must be positive");
  if (!(bounds.x_max > bounds.x_min && bounds.y_max > bounds.y_min)) {
    throw ValidationError("boundary grid: empty bounds");
  }
  PosteriorMatrix p = model.predict(lattice(bounds, resolution));
  if (calib) {
    p = calibrate(p, calib->source, calib->target, CalibrationConfig{calib->lambda});
  }
  LabelVector pred = argmax_row(p);
  return {bounds, resolution, {pred.values().begin(), pred.values().end()}};
}

LambdaCurve lambda_curve(const MlpModel& model, const ToyData& val, const PriorVector& source,
                         const PriorVector& target, const SearchConfig& cfg, MetricKind metric) {
  const PosteriorMatrix p_d = model.predict(val.features);
  const PosteriorMatrix p_r = rebalance(p_d, source, target);
  MetricFn fn = [&](double lambda) {
    return evaluate(interpolate(p_d, p_r, lambda), val.labels).metric(metric);
  };
  LambdaCurve out;
  GridResult grid = grid_search(fn, cfg);
  out.curve = std::move(grid.curve);
  out.grid_lambda = grid.lambda;
  out.search = search_lambda(fn, cfg);
  out.unimodal = unimodality_check(out.curve);
  out.fell_back_to_grid = !out.unimodal;
  out.best_lambda = out.unimodal ? out.search.lambda : out.grid_lambda;
  return out;
}

ToyExperimentConfig toy_defaults(ToyShape shape) {
  ToyExperimentConfig cfg;
  cfg.data.shape = shape;
  cfg.train.learning_rate = shape == ToyShape::kTwoMoons ? 0.2 : 0.05;
  return cfg;
}

ToyExperiment run_toy_experiment(const ToyExperimentConfig& cfg) {
  ToyData data = generate(cfg.data);
  ToySplits splits = stratified_split(data, cfg.data.val_fraction, cfg.data.test_fraction,
                                      cfg.data.seed + 1);
  MlpModel model(cfg.layer_sizes, cfg.data.seed + 2);
  TrainResult trained = train(std::move(model), splits.train, cfg.train);
  PriorVector source = estimate_source_prior(splits.train.labels, 2);
  PriorVector target = PriorVector::uniform(2, PriorRole::kTarget);

  LambdaCurve curve = lambda_curve(trained.model, splits.val, source, target, cfg.search, cfg.metric);

  const PosteriorMatrix test_d = trained.model.predict(splits.test.features);
  const PosteriorMatrix test_r = rebalance(test_d, source, target);
  EvalReport at_zero = evaluate(interpolate(test_d, test_r, 0.0), splits.test.labels);
  EvalReport at_best = evaluate(interpolate(test_d, test_r, curve.best_lambda), splits.test.labels);

  const GridBounds bounds = bounds_of(data.features);
  BoundaryGrid grid_zero = boundary_grid(trained.model, bounds, cfg.grid_resolution);
  BoundaryGrid grid_best = boundary_grid(trained.model, bounds, cfg.grid_resolution,
                                         BoundaryCalibration{source, target, curve.best_lambda});

  std::vector<std::pair<double, std::size_t>> area;
  bool monotone = true;
  for (int step = 0; step <= 10; ++step) {
    const double lambda = step / 10.0;
    const std::size_t cells =
        boundary_grid(trained.model, bounds, cfg.grid_resolution,
                      BoundaryCalibration{source, target, lambda})
            .count(1);
    if (!area.empty() && cells < area.back().second) monotone = false;
    area.emplace_back(lambda, cells);
  }

  ToyExperiment exp{std::move(data),
                    std::move(splits),
                    std::move(trained),
                    std::move(source),
                    std::move(target),
                    std::move(curve),
                    at_zero.metric(cfg.metric),
                    at_best.metric(cfg.metric),
                    std::move(at_zero),
                    std::move(at_best),
                    std::move(grid_zero),
                    std::move(grid_best),
                    std::move(area),
                    monotone};
  return exp;
}

std::string dataset_csv(const ToyExperiment& exp) {
  std::ostringstream os;
  os.precision(17);
  os << "x,y,label,split\n";
  const std::pair<const ToyData*, const char*> parts[] = {
      {&exp.splits.train, "train"}, {&exp.splits.val, "val"}, {&exp.splits.test, "test"}};
  for (const auto& [part, name] : parts) {
    for (std::size_t i = 0; i < part->labels.size(); ++i) {
      os << part->features(i, 0) << ',' << part->features(i, 1) << ',' << part->labels[i] << ','
         << name << '\n';
    }
  }
  return os.str();
}

std::string boundary_csv(const BoundaryGrid& at_zero, const BoundaryGrid& at_best) {
  if (at_zero.resolution != at_best.resolution) {
    throw ValidationError("boundary csv: grids differ in resolution");
  }
  std::ostringstream os;
  os.precision(10);
  os << "x,y,label_lambda0,label_best\n";
  const std::size_t res = at_zero.resolution;
  for (std::size_t iy = 0; iy < res; ++iy) {
    for (std::size_t ix = 0; ix < res; ++ix) {
      os << at_zero.x_at(ix) << ',' << at_zero.y_at(iy) << ',' << at_zero.labels[iy * res + ix]
         << ',' << at_best.labels[iy * res + ix] << '\n';
    }
  }
  return os.str();
}

std::string to_json(const ToyExperiment& exp, const ToyExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["shape"] = to_string(cfg.data.shape);
  j["seed"] = cfg.data.seed;
  j["majority_size"] = cfg.data.majority_size;
  j["minority_size"] = cfg.data.minority_size();
  j["imbalance_ratio"] = cfg.data.imbalance_ratio;
  j["noise"] = cfg.data.noise;
  j["metric"] = to_string(cfg.metric);
  j["epochs"] = cfg.train.epochs;
  j["learning_rate"] = cfg.train.learning_rate;
  j["final_train_loss"] = exp.trained.loss_history.empty() ? 0.0 : exp.trained.loss_history.back();
  j["source_prior"] = std::vector<double>(exp.source_prior.values().begin(),
                                          exp.source_prior.values().end());
  j["searched_lambda"] = exp.curve.search.lambda;
  j["search_evaluations"] = exp.curve.search.evaluations;
  j["grid_lambda"] = exp.curve.grid_lambda;
  j["unimodal"] = exp.curve.unimodal;
  j["fell_back_to_grid"] = exp.curve.fell_back_to_grid;
  j["best_lambda"] = exp.curve.best_lambda;
  j["test_metric_lambda0"] = exp.test_metric_at_zero;
  j["test_metric_best"] = exp.test_metric_at_best;
  j["test_accuracy_lambda0"] = exp.test_report_at_zero.accuracy;
  j["test_accuracy_best"] = exp.test_report_at_best.accuracy;
  j["test_mean_accuracy_lambda0"] = exp.test_report_at_zero.mean_accuracy;
  j["test_mean_accuracy_best"] = exp.test_report_at_best.mean_accuracy;
  auto area = nlohmann::ordered_json::array();
  for (const auto& [lambda, cells] : exp.minority_area) {
    area.push_back({{"lambda", lambda}, {"minority_cells", cells}});
  }
  j["minority_area"] = std::move(area);
  j["area_monotone"] = exp.area_monotone;
  return j.dump(2);
}

std::string boundary_svg(const ToyExperiment& exp) {
  const BoundaryGrid& g = exp.grid_at_best;
  const double size = 400.0;
  const double cell = size / static_cast<double>(g.resolution);
  auto px = [&](double x) { return (x - g.bounds.x_min) / (g.bounds.x_max - g.bounds.x_min) * size; };
  auto py = [&](double y) { return size - (y - g.bounds.y_min) / (g.bounds.y_max - g.bounds.y_min) * size; };
  std::ostringstream os;
  os.precision(5);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
     << "\">\n";
  for (std::size_t iy = 0; iy < g.resolution; ++iy) {
    for (std::size_t ix = 0; ix < g.resolution; ++ix) {
      const bool minority = g.labels[iy * g.resolution + ix] == 1;
      os << "<rect x=\"" << static_cast<double>(ix) * cell << "\" y=\""
         << size - static_cast<double>(iy + 1) * cell << "\" width=\"" << cell << "\" height=\""
         << cell << "\" fill=\"" << (minority ? "#c6dbef" : "#fcbba1") << "\"/>\n";
    }
  }
  const ToyData& train = exp.splits.train;
  for (std::size_t i = 0; i < train.labels.size(); ++i) {
    os << "<circle cx=\"" << px(train.features(i, 0)) << "\" cy=\"" << py(train.features(i, 1))
       << "\" r=\"1.5\" fill=\"" << (train.labels[i] == 1 ? "#08519c" : "#a50f15") << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace imbcal
