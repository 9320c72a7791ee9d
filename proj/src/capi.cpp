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
#include "imbcal/imbcal.h"

#include <algorithm>
#include <exception>
#include <filesystem>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "bayes_oracle.hpp"
#include "calibrate.hpp"
#include "core.hpp"
#include "error.hpp"
#include "fusion.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "search.hpp"
#include "toytrain.hpp"

struct imbcal_matrix {
  imbcal::Matrix values;
  imbcal::Content content;
};

struct imbcal_labels {
  imbcal::LabelVector labels;
};

struct imbcal_prior {
  imbcal::PriorVector prior;
};

struct imbcal_report {
  nlohmann::json doc;
  std::string json_text;
  std::string csv_header;
  std::string csv_row;
};

struct imbcal_curve {
  std::vector<std::pair<double, double>> points;
  std::string x_name;
  std::string y_name;
  std::string csv;
};

struct imbcal_fusion {
  std::vector<imbcal::ModalityInput> modalities;
};

struct imbcal_task {
  imbcal::GaussianTaskSpec spec;
};

struct imbcal_toy_result {
  imbcal::ToyExperimentConfig config;
  imbcal::ToyExperiment experiment;
  imbcal_report report;
};

namespace {

using imbcal::ErrorKind;

thread_local std::string g_last_error;

// Thrown through the core when a user metric callback fails.
struct CallbackFailure {
  imbcal_status status;
};

imbcal_status fail(imbcal_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename F>
imbcal_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return IMBCAL_OK;
  } catch (const imbcal::Error& e) {
    switch (e.kind()) {
      case ErrorKind::kValidation: return fail(IMBCAL_ERR_VALIDATION, e.what());
      case ErrorKind::kIo: return fail(IMBCAL_ERR_IO, e.what());
      case ErrorKind::kNumeric: return fail(IMBCAL_ERR_NUMERIC, e.what());
    }
    return fail(IMBCAL_ERR_INTERNAL, e.what());
  } catch (const CallbackFailure& f) {
    return fail(f.status == IMBCAL_OK ? IMBCAL_ERR_INTERNAL : f.status,
                "metric callback failed" + (g_last_error.empty() ? "" : ": " + g_last_error));
  } catch (const std::bad_alloc&) {
    return fail(IMBCAL_ERR_INTERNAL, "out of memory");
  } catch (const nlohmann::json::exception& e) {
    return fail(IMBCAL_ERR_VALIDATION, e.what());
  } catch (const std::exception& e) {
    return fail(IMBCAL_ERR_INTERNAL, e.what());
  }
}

void require(const void* p, const char* name) {
  if (p == nullptr) throw imbcal::ValidationError(std::string(name) + " is null");
}

imbcal::Content content_of(imbcal_content c) {
  switch (c) {
    case IMBCAL_CONTENT_LOGITS: return imbcal::Content::kLogits;
    case IMBCAL_CONTENT_PROBS: return imbcal::Content::kProbs;
  }
  throw imbcal::ValidationError("unknown content tag");
}

imbcal::PriorRole role_of(imbcal_prior_role r) {
  switch (r) {
    case IMBCAL_PRIOR_SOURCE: return imbcal::PriorRole::kSource;
    case IMBCAL_PRIOR_TARGET: return imbcal::PriorRole::kTarget;
  }
  throw imbcal::ValidationError("unknown prior role");
}

imbcal::MetricKind metric_of(imbcal_metric m) {
  switch (m) {
    case IMBCAL_METRIC_ACCURACY: return imbcal::MetricKind::kAccuracy;
    case IMBCAL_METRIC_MEAN_ACCURACY: return imbcal::MetricKind::kMeanAccuracy;
    case IMBCAL_METRIC_MEAN_IOU: return imbcal::MetricKind::kMeanIou;
  }
  throw imbcal::ValidationError("unknown metric");
}

imbcal::SearchConfig search_of(const imbcal_search_config* c) {
  if (c == nullptr) return {};
  return {c->low, c->high, c->prec, c->max_high};
}

imbcal::PosteriorMatrix posterior_of(const imbcal_matrix* m) {
  require(m, "matrix");
  if (m->content != imbcal::Content::kProbs) {
    throw imbcal::ValidationError("expected a probability matrix, got logits");
  }
  return imbcal::PosteriorMatrix(m->values);
}

imbcal::LogitMatrix logits_of(const imbcal_matrix* m) {
  require(m, "matrix");
  if (m->content != imbcal::Content::kLogits) {
    throw imbcal::ValidationError("expected a logit matrix, got probabilities");
  }
  return imbcal::LogitMatrix(m->values);
}

imbcal::TemperatureSpec temperature_of(const double* delta, std::size_t n_delta) {
  require(delta, "delta");
  if (n_delta == 0) throw imbcal::ValidationError("delta: empty");
  if (n_delta == 1) return imbcal::TemperatureSpec::scalar(delta[0]);
  return imbcal::TemperatureSpec::per_sample(std::vector<double>(delta, delta + n_delta));
}

void emit(imbcal_matrix** out, const imbcal::PosteriorMatrix& p) {
  *out = new imbcal_matrix{p.values(), imbcal::Content::kProbs};
}

imbcal_curve* make_curve(const std::vector<imbcal::CurvePoint>& points) {
  auto* c = new imbcal_curve{{}, "lambda", "score", {}};
  for (const auto& p : points) c->points.emplace_back(p.lambda, p.score);
  return c;
}

imbcal::MetricFn wrap_callback(imbcal_metric_fn metric, void* user_data) {
  require(reinterpret_cast<const void*>(metric), "metric callback");
  return [metric, user_data](double lambda) {
    double score = 0.0;
    const imbcal_status s = metric(lambda, user_data, &score);
    if (s != IMBCAL_OK) throw CallbackFailure{s};
    return score;
  };
}

imbcal::MetricFn calibration_metric(const imbcal::PosteriorMatrix& p_d,
                                    const imbcal::PosteriorMatrix& p_r,
                                    const imbcal::LabelVector& labels, imbcal::MetricKind kind) {
  return [&p_d, &p_r, &labels, kind](double lambda) {
    return imbcal::evaluate(imbcal::interpolate(p_d, p_r, lambda), labels).metric(kind);
  };
}

void write_summary(imbcal_search_summary* summary, const imbcal::SearchResult& r) {
  summary->lambda = r.lambda;
  summary->score = r.score;
  summary->evaluations = r.evaluations;
  summary->hit_cap = r.hit_cap ? 1 : 0;
}

}  // namespace

extern "C" {

const char* imbcal_version(void) { return IMBCAL_VERSION_STRING; }

const char* imbcal_status_name(imbcal_status status) {
  switch (status) {
    case IMBCAL_OK: return "ok";
    case IMBCAL_ERR_VALIDATION: return "validation error";
    case IMBCAL_ERR_IO: return "i/o error";
    case IMBCAL_ERR_NUMERIC: return "numeric error";
    case IMBCAL_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* imbcal_last_error(void) { return g_last_error.c_str(); }

// ---- Matrices --------------------------------------------------------------

imbcal_status imbcal_matrix_create(const double* values, size_t rows, size_t cols,
                                   imbcal_content content, imbcal_matrix** out) {
  return guarded([&] {
    require(out, "out");
    require(values, "values");
    imbcal_matrix m{imbcal::Matrix(rows, cols, std::vector<double>(values, values + rows * cols)),
                    content_of(content)};
    if (m.content == imbcal::Content::kProbs) {
      imbcal::PosteriorMatrix check(m.values);
    } else {
      imbcal::LogitMatrix check(m.values);
    }
    *out = new imbcal_matrix(std::move(m));
  });
}

imbcal_status imbcal_matrix_load(const char* path, imbcal_content csv_content,
                                 imbcal_matrix** out) {
  return guarded([&] {
    require(out, "out");
    require(path, "path");
    imbcal::PredictionFile file = imbcal::load_predictions(path, content_of(csv_content));
    *out = new imbcal_matrix{std::move(file.values), file.content};
  });
}

imbcal_status imbcal_matrix_save(const imbcal_matrix* m, const char* path) {
  return guarded([&] {
    require(m, "matrix");
    require(path, "path");
    imbcal::save_predictions(path, imbcal::PredictionFile{m->content, m->values});
  });
}

size_t imbcal_matrix_rows(const imbcal_matrix* m) { return m ? m->values.rows() : 0; }
size_t imbcal_matrix_cols(const imbcal_matrix* m) { return m ? m->values.cols() : 0; }
imbcal_content imbcal_matrix_content(const imbcal_matrix* m) {
  return m && m->content == imbcal::Content::kLogits ? IMBCAL_CONTENT_LOGITS : IMBCAL_CONTENT_PROBS;
}
const double* imbcal_matrix_data(const imbcal_matrix* m) {
  return m ? m->values.values().data() : nullptr;
}
void imbcal_matrix_free(imbcal_matrix* m) { delete m; }

// ---- Labels and priors -----------------------------------------------------

imbcal_status imbcal_labels_create(const uint32_t* values, size_t n, size_t n_classes,
                                   imbcal_labels** out) {
  return guarded([&] {
    require(out, "out");
    if (n > 0) require(values, "values");
    std::vector<std::uint32_t> v(values, values + n);
    *out = new imbcal_labels{imbcal::LabelVector(std::move(v), n_classes)};
  });
}

imbcal_status imbcal_labels_load(const char* path, size_t n_classes, imbcal_labels** out) {
  return guarded([&] {
    require(out, "out");
    require(path, "path");
    *out = new imbcal_labels{imbcal::load_labels(path, n_classes)};
  });
}

size_t imbcal_labels_size(const imbcal_labels* labels) { return labels ? labels->labels.size() : 0; }
const uint32_t* imbcal_labels_data(const imbcal_labels* labels) {
  return labels ? labels->labels.values().data() : nullptr;
}
void imbcal_labels_free(imbcal_labels* labels) { delete labels; }

imbcal_status imbcal_values_load(const char* path, double** values, size_t* n) {
  return guarded([&] {
    require(path, "path");
    require(values, "values");
    require(n, "n");
    const std::vector<double> column = imbcal::load_column(path);
    auto buffer = std::make_unique<double[]>(column.size() == 0 ? 1 : column.size());
    std::copy(column.begin(), column.end(), buffer.get());
    *values = buffer.release();
    *n = column.size();
  });
}

void imbcal_values_free(double* values) { delete[] values; }

imbcal_status imbcal_argmax(const imbcal_matrix* probs, imbcal_labels** out) {
  return guarded([&] {
    require(out, "out");
    *out = new imbcal_labels{imbcal::argmax_row(posterior_of(probs))};
  });
}

imbcal_status imbcal_prior_create(const double* values, size_t n_classes, imbcal_prior_role role,
                                  imbcal_prior** out) {
  return guarded([&] {
    require(out, "out");
    require(values, "values");
    *out = new imbcal_prior{
        imbcal::PriorVector(std::vector<double>(values, values + n_classes), role_of(role))};
  });
}

imbcal_status imbcal_prior_load(const char* path_or_uniform, size_t n_classes,
                                imbcal_prior_role role, imbcal_prior** out) {
  return guarded([&] {
    require(out, "out");
    require(path_or_uniform, "path");
    *out = new imbcal_prior{imbcal::load_prior(path_or_uniform, n_classes, role_of(role))};
  });
}

imbcal_status imbcal_prior_estimate(const imbcal_labels* labels, imbcal_prior** out) {
  return guarded([&] {
    require(out, "out");
    require(labels, "labels");
    *out = new imbcal_prior{
        imbcal::estimate_source_prior(labels->labels, labels->labels.n_classes())};
  });
}

size_t imbcal_prior_size(const imbcal_prior* prior) { return prior ? prior->prior.size() : 0; }
const double* imbcal_prior_data(const imbcal_prior* prior) {
  return prior ? prior->prior.values().data() : nullptr;
}
void imbcal_prior_free(imbcal_prior* prior) { delete prior; }

// ---- Posterior transforms --------------------------------------------------

imbcal_status imbcal_softmax(const imbcal_matrix* logits, imbcal_matrix** out) {
  return guarded([&] {
    require(out, "out");
    emit(out, imbcal::softmax(logits_of(logits)));
  });
}

imbcal_status imbcal_temperature_scale(const imbcal_matrix* logits, const double* delta,
                                       size_t n_delta, imbcal_matrix** out) {
  return guarded([&] {
    require(out, "out");
    emit(out, imbcal::temperature_scale(logits_of(logits), temperature_of(delta, n_delta)));
  });
}

imbcal_status imbcal_rebalance(const imbcal_matrix* probs, const imbcal_prior* source,
                               const imbcal_prior* target, imbcal_matrix** out) {
  return guarded([&] {
    require(out, "out");
    require(source, "source prior");
    require(target, "target prior");
    emit(out, imbcal::rebalance(posterior_of(probs), source->prior, target->prior));
  });
}

imbcal_status imbcal_interpolate(const imbcal_matrix* p_d, const imbcal_matrix* p_r, double lambda,
                                 imbcal_matrix** out) {
  return guarded([&] {
    require(out, "out");
    emit(out, imbcal::interpolate(posterior_of(p_d), posterior_of(p_r), lambda));
  });
}

imbcal_status imbcal_calibrate(const imbcal_matrix* probs, const imbcal_prior* source,
                               const imbcal_prior* target, double lambda, imbcal_matrix** out) {
  return guarded([&] {
    require(out, "out");
    require(source, "source prior");
    require(target, "target prior");
    emit(out, imbcal::calibrate(posterior_of(probs), source->prior, target->prior,
                                imbcal::CalibrationConfig{lambda}));
  });
}

// ---- Reports ---------------------------------------------------------------

imbcal_status imbcal_evaluate(const imbcal_matrix* probs, const imbcal_labels* labels,
                              imbcal_report** out) {
  return guarded([&] {
    require(out, "out");
    require(labels, "labels");
    const imbcal::PosteriorMatrix p = posterior_of(probs);
    if (labels->labels.n_classes() != p.n_classes()) {
      throw imbcal::ValidationError("labels declare " +
                                    std::to_string(labels->labels.n_classes()) +
                                    " classes, predictions have " +
                                    std::to_string(p.n_classes()));
    }
    const imbcal::EvalReport r = imbcal::evaluate(p, labels->labels);
    auto report = std::make_unique<imbcal_report>();
    report->json_text = imbcal::to_json(r);
    report->doc = nlohmann::json::parse(report->json_text);
    report->csv_header = imbcal::csv_header(p.n_classes());
    report->csv_row = imbcal::csv_row(r);
    *out = report.release();
  });
}

imbcal_status imbcal_report_number(const imbcal_report* report, const char* pointer, double* out) {
  return guarded([&] {
    require(report, "report");
    require(pointer, "pointer");
    require(out, "out");
    const auto& v = report->doc.at(nlohmann::json::json_pointer(pointer));
    if (v.is_boolean()) {
      *out = v.get<bool>() ? 1.0 : 0.0;
    } else if (v.is_number()) {
      *out = v.get<double>();
    } else {
      throw imbcal::ValidationError(std::string("report field ") + pointer + " is not a number");
    }
  });
}

const char* imbcal_report_json(const imbcal_report* report) {
  return report ? report->json_text.c_str() : "";
}
const char* imbcal_report_csv_header(const imbcal_report* report) {
  return report ? report->csv_header.c_str() : "";
}
const char* imbcal_report_csv_row(const imbcal_report* report) {
  return report ? report->csv_row.c_str() : "";
}
void imbcal_report_free(imbcal_report* report) { delete report; }

// ---- Lambda search ---------------------------------------------------------

imbcal_search_config imbcal_search_config_default(void) {
  const imbcal::SearchConfig d;
  return {d.low, d.high, d.prec, d.max_high};
}

imbcal_status imbcal_search_lambda(imbcal_metric_fn metric, void* user_data,
                                   const imbcal_search_config* config,
                                   imbcal_search_summary* summary, imbcal_curve** trace) {
  return guarded([&] {
    require(summary, "summary");
    const imbcal::SearchResult r =
        imbcal::search_lambda(wrap_callback(metric, user_data), search_of(config));
    write_summary(summary, r);
    if (trace) {
      auto sorted = r.trace;
      std::sort(sorted.begin(), sorted.end(),
                [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
      *trace = make_curve(sorted);
    }
  });
}

imbcal_status imbcal_grid_search(imbcal_metric_fn metric, void* user_data,
                                 const imbcal_search_config* config, double* best_lambda,
                                 imbcal_curve** curve) {
  return guarded([&] {
    require(best_lambda, "best_lambda");
    const imbcal::GridResult r =
        imbcal::grid_search(wrap_callback(metric, user_data), search_of(config));
    *best_lambda = r.lambda;
    if (curve) *curve = make_curve(r.curve);
  });
}

imbcal_status imbcal_search_calibration(const imbcal_matrix* probs, const imbcal_labels* labels,
                                        const imbcal_prior* source, const imbcal_prior* target,
                                        imbcal_metric metric, const imbcal_search_config* config,
                                        imbcal_search_summary* summary, imbcal_curve** trace) {
  return guarded([&] {
    require(summary, "summary");
    require(labels, "labels");
    require(source, "source prior");
    require(target, "target prior");
    const imbcal::PosteriorMatrix p_d = posterior_of(probs);
    const imbcal::PosteriorMatrix p_r = imbcal::rebalance(p_d, source->prior, target->prior);
    const imbcal::SearchResult r = imbcal::search_lambda(
        calibration_metric(p_d, p_r, labels->labels, metric_of(metric)), search_of(config));
    write_summary(summary, r);
    if (trace) {
      auto sorted = r.trace;
      std::sort(sorted.begin(), sorted.end(),
                [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
      *trace = make_curve(sorted);
    }
  });
}

imbcal_status imbcal_grid_calibration(const imbcal_matrix* probs, const imbcal_labels* labels,
                                      const imbcal_prior* source, const imbcal_prior* target,
                                      imbcal_metric metric, const imbcal_search_config* config,
                                      double* best_lambda, imbcal_curve** curve) {
  return guarded([&] {
    require(best_lambda, "best_lambda");
    require(labels, "labels");
    require(source, "source prior");
    require(target, "target prior");
    const imbcal::PosteriorMatrix p_d = posterior_of(probs);
    const imbcal::PosteriorMatrix p_r = imbcal::rebalance(p_d, source->prior, target->prior);
    const imbcal::GridResult r = imbcal::grid_search(
        calibration_metric(p_d, p_r, labels->labels, metric_of(metric)), search_of(config));
    *best_lambda = r.lambda;
    if (curve) *curve = make_curve(r.curve);
  });
}

size_t imbcal_curve_size(const imbcal_curve* curve) { return curve ? curve->points.size() : 0; }

imbcal_status imbcal_curve_point(const imbcal_curve* curve, size_t index, double* x, double* y) {
  return guarded([&] {
    require(curve, "curve");
    if (index >= curve->points.size()) throw imbcal::ValidationError("curve index out of range");
    if (x) *x = curve->points[index].first;
    if (y) *y = curve->points[index].second;
  });
}

int imbcal_curve_is_unimodal(const imbcal_curve* curve) {
  if (!curve) return 0;
  std::vector<double> ys;
  for (const auto& p : curve->points) ys.push_back(p.second);
  return imbcal::unimodality_check(ys) ? 1 : 0;
}

const char* imbcal_curve_csv(const imbcal_curve* curve) {
  if (!curve) return "";
  auto* c = const_cast<imbcal_curve*>(curve);
  if (c->csv.empty()) {
    std::ostringstream os;
    os.precision(17);
    os << c->x_name << ',' << c->y_name << '\n';
    for (const auto& [x, y] : c->points) os << x << ',' << y << '\n';
    c->csv = os.str();
  }
  return c->csv.c_str();
}

void imbcal_curve_free(imbcal_curve* curve) { delete curve; }

// ---- Fusion ----------------------------------------------------------------

imbcal_status imbcal_fusion_create(imbcal_fusion** out) {
  return guarded([&] {
    require(out, "out");
    *out = new imbcal_fusion{};
  });
}

imbcal_status imbcal_fusion_add_modality(imbcal_fusion* fusion, const imbcal_matrix* logits,
                                         const double* delta, size_t n_delta,
                                         const imbcal_prior* source, const imbcal_prior* target) {
  return guarded([&] {
    require(fusion, "fusion");
    require(source, "source prior");
    require(target, "target prior");
    imbcal::ModalityInput m{logits_of(logits), temperature_of(delta, n_delta), source->prior,
                            target->prior};
    if (!fusion->modalities.empty()) {
      const auto& first = fusion->modalities.front().logits;
      if (first.n_samples() != m.logits.n_samples() || first.n_classes() != m.logits.n_classes()) {
        throw imbcal::ValidationError("fusion: modality shapes differ");
      }
    }
    if (m.source_prior.size() != m.logits.n_classes() ||
        m.target_prior.size() != m.logits.n_classes()) {
      throw imbcal::ValidationError("fusion: prior length does not match class count");
    }
    fusion->modalities.push_back(std::move(m));
  });
}

size_t imbcal_fusion_size(const imbcal_fusion* fusion) {
  return fusion ? fusion->modalities.size() : 0;
}

imbcal_status imbcal_fusion_calibrated(const imbcal_fusion* fusion, size_t index, double lambda,
                                       imbcal_matrix** out) {
  return guarded([&] {
    require(fusion, "fusion");
    require(out, "out");
    if (index >= fusion->modalities.size()) throw imbcal::ValidationError("modality index out of range");
    emit(out, imbcal::calibrate_modality(fusion->modalities[index], lambda));
  });
}

imbcal_status imbcal_fusion_run(const imbcal_fusion* fusion, double lambda, imbcal_matrix** out) {
  return guarded([&] {
    require(fusion, "fusion");
    require(out, "out");
    emit(out, imbcal::fuse(fusion->modalities, lambda));
  });
}

void imbcal_fusion_free(imbcal_fusion* fusion) { delete fusion; }

imbcal_status imbcal_noisy_or(const imbcal_matrix* const* posteriors, size_t count,
                              imbcal_matrix** out) {
  return guarded([&] {
    require(out, "out");
    if (count > 0) require(posteriors, "posteriors");
    std::vector<imbcal::PosteriorMatrix> ps;
    ps.reserve(count);
    for (size_t i = 0; i < count; ++i) ps.push_back(posterior_of(posteriors[i]));
    emit(out, imbcal::noisy_or_fuse(ps));
  });
}

// ---- Oracle ----------------------------------------------------------------

imbcal_status imbcal_task_canonical(imbcal_task** out) {
  return guarded([&] {
    require(out, "out");
    *out = new imbcal_task{imbcal::GaussianTaskSpec::canonical()};
  });
}

imbcal_status imbcal_task_parse(const char* text, imbcal_task** out) {
  return guarded([&] {
    require(out, "out");
    require(text, "text");
    *out = new imbcal_task{imbcal::parse_task_spec(text)};
  });
}

imbcal_status imbcal_task_load(const char* path, imbcal_task** out) {
  return guarded([&] {
    require(out, "out");
    require(path, "path");
    *out = new imbcal_task{imbcal::load_task_spec(path)};
  });
}

void imbcal_task_free(imbcal_task* task) { delete task; }

imbcal_status imbcal_oracle_run(const imbcal_task* task, double resolution, uint64_t seed,
                                imbcal_report** report, imbcal_curve** risk_curve) {
  return guarded([&] {
    require(task, "task");
    require(report, "report");
    imbcal::OracleReport r = imbcal::run_oracle(task->spec, resolution, seed);
    auto rep = std::make_unique<imbcal_report>();
    rep->json_text = imbcal::to_json(r);
    rep->doc = nlohmann::json::parse(rep->json_text);
    if (risk_curve) {
      *risk_curve = new imbcal_curve{std::move(r.risk_curve), "threshold", "risk", {}};
    }
    *report = rep.release();
  });
}

// ---- Toy experiment --------------------------------------------------------

imbcal_toy_config imbcal_toy_config_default(imbcal_toy_shape shape) {
  if (shape != IMBCAL_TOY_CIRCLE) shape = IMBCAL_TOY_TWO_MOONS;
  const imbcal::ToyExperimentConfig d = imbcal::toy_defaults(
      shape == IMBCAL_TOY_CIRCLE ? imbcal::ToyShape::kCircle : imbcal::ToyShape::kTwoMoons);
  imbcal_toy_config c{};
  c.shape = shape;
  c.majority_size = d.data.majority_size;
  c.imbalance_ratio = d.data.imbalance_ratio;
  c.noise = d.data.noise;
  c.seed = d.data.seed;
  c.val_fraction = d.data.val_fraction;
  c.test_fraction = d.data.test_fraction;
  c.hidden_width = d.layer_sizes[1];
  c.epochs = d.train.epochs;
  c.learning_rate = d.train.learning_rate;
  c.metric = IMBCAL_METRIC_MEAN_ACCURACY;
  c.search = imbcal_search_config_default();
  c.grid_resolution = d.grid_resolution;
  return c;
}

imbcal_status imbcal_toy_run(const imbcal_toy_config* config, imbcal_toy_result** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    imbcal::ToyExperimentConfig cfg;
    switch (config->shape) {
      case IMBCAL_TOY_TWO_MOONS: cfg.data.shape = imbcal::ToyShape::kTwoMoons; break;
      case IMBCAL_TOY_CIRCLE: cfg.data.shape = imbcal::ToyShape::kCircle; break;
      default: throw imbcal::ValidationError("unknown toy shape");
    }
    cfg.data.majority_size = config->majority_size;
    cfg.data.imbalance_ratio = config->imbalance_ratio;
    cfg.data.noise = config->noise;
    cfg.data.seed = config->seed;
    cfg.data.val_fraction = config->val_fraction;
    cfg.data.test_fraction = config->test_fraction;
    cfg.layer_sizes = {2, config->hidden_width, config->hidden_width, 2};
    cfg.train.epochs = config->epochs;
    cfg.train.learning_rate = config->learning_rate;
    cfg.metric = metric_of(config->metric);
    cfg.search = search_of(&config->search);
    cfg.grid_resolution = config->grid_resolution;
    imbcal::ToyExperiment exp = imbcal::run_toy_experiment(cfg);
    auto result = std::make_unique<imbcal_toy_result>(
        imbcal_toy_result{cfg, std::move(exp), imbcal_report{}});
    result->report.json_text = imbcal::to_json(result->experiment, result->config);
    result->report.doc = nlohmann::json::parse(result->report.json_text);
    *out = result.release();
  });
}

const imbcal_report* imbcal_toy_result_report(const imbcal_toy_result* result) {
  return result ? &result->report : nullptr;
}

imbcal_status imbcal_toy_result_save(const imbcal_toy_result* result, const char* out_dir,
                                     int write_svg) {
  return guarded([&] {
    require(result, "result");
    require(out_dir, "out_dir");
    const std::filesystem::path dir(out_dir);
    if (!std::filesystem::is_directory(dir)) {
      throw imbcal::IoError("output directory does not exist: " + dir.string());
    }
    const auto& exp = result->experiment;
    imbcal::write_file(dir / "dataset.csv", imbcal::dataset_csv(exp));
    imbcal::write_file(dir / "boundary.csv", imbcal::boundary_csv(exp.grid_at_zero, exp.grid_at_best));
    imbcal::write_file(dir / "curve.csv", imbcal::curve_csv(exp.curve.curve));
    imbcal::write_file(dir / "report.json", result->report.json_text);
    if (write_svg) imbcal::write_file(dir / "boundary.svg", imbcal::boundary_svg(exp));
  });
}

void imbcal_toy_result_free(imbcal_toy_result* result) { delete result; }

}  // extern "C"
