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

// Command-line front end for the imbcal shared library.
//
//   imbcal calibrate --probs val.bin --source-prior train_prior.txt --lambda 0.5 --out-dir out
//   imbcal search    --probs val.bin --labels val_labels.txt --source-prior p.txt --out-dir out
//   imbcal fuse      --logits rgb.bin --logits depth.bin --delta 1 --delta 0.5 ... --out-dir out
//   imbcal eval      --probs test.bin --labels test_labels.txt --out-dir out
//   imbcal toy       --shape circle --seed 3 --out-dir out
//   imbcal oracle    --task task.txt --out-dir out
//
// Every subcommand accepts --config FILE, an INI file whose [section] names
// match subcommands and whose keys are long flag names. Flags given on the
// command line take precedence over the file.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "imbcal/imbcal.h"

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitIo = 3,
  kExitNumeric = 4,
  kExitInternal = 5,
};

int exit_code_for(imbcal_status status) {
  switch (status) {
    case IMBCAL_OK: return kExitOk;
    case IMBCAL_ERR_VALIDATION: return kExitValidation;
    case IMBCAL_ERR_IO: return kExitIo;
    case IMBCAL_ERR_NUMERIC: return kExitNumeric;
    case IMBCAL_ERR_INTERNAL: return kExitInternal;
  }
  return kExitInternal;
}

class CliFailure : public std::runtime_error {
 public:
  CliFailure(int code, const std::string& message) : std::runtime_error(message), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

void check(imbcal_status status, const std::string& context) {
  if (status == IMBCAL_OK) return;
  std::string message = context + ": " + imbcal_status_name(status);
  const std::string detail = imbcal_last_error();
  if (!detail.empty()) message += " (" + detail + ")";
  throw CliFailure(exit_code_for(status), message);
}

[[noreturn]] void invalid(const std::string& message) {
  throw CliFailure(kExitValidation, message);
}

template <auto Free>
struct Releaser {
  template <typename T>
  void operator()(T* p) const { Free(p); }
};

using Matrix = std::unique_ptr<imbcal_matrix, Releaser<imbcal_matrix_free>>;
using Labels = std::unique_ptr<imbcal_labels, Releaser<imbcal_labels_free>>;
using Prior = std::unique_ptr<imbcal_prior, Releaser<imbcal_prior_free>>;
using Report = std::unique_ptr<imbcal_report, Releaser<imbcal_report_free>>;
using Curve = std::unique_ptr<imbcal_curve, Releaser<imbcal_curve_free>>;
using Fusion = std::unique_ptr<imbcal_fusion, Releaser<imbcal_fusion_free>>;
using Task = std::unique_ptr<imbcal_task, Releaser<imbcal_task_free>>;
using ToyResult = std::unique_ptr<imbcal_toy_result, Releaser<imbcal_toy_result_free>>;

std::optional<double> parse_number(const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

imbcal_metric metric_from_name(const std::string& name) {
  if (name == "accuracy") return IMBCAL_METRIC_ACCURACY;
  if (name == "mean_accuracy") return IMBCAL_METRIC_MEAN_ACCURACY;
  if (name == "mean_iou") return IMBCAL_METRIC_MEAN_IOU;
  invalid("unknown metric '" + name + "'");
}

// ---- Options shared between subcommands -------------------------------------

struct InputOptions {
  std::string probs;
  std::string logits;
  std::string delta = "1";
  std::string labels;
  std::string source_prior;
  std::string train_labels;
  std::string target_prior = "uniform";
};

struct SearchOptions {
  std::string metric = "mean_accuracy";
  imbcal_search_config config = imbcal_search_config_default();
  bool grid = false;
};

struct Command {
  std::string out_dir;
  InputOptions input;
  SearchOptions search;
  std::string lambda = "1";
};

void add_out_dir(CLI::App* cmd, std::string& out_dir) {
  cmd->add_option("--out-dir", out_dir, "Directory receiving every output file")->required();
}

void add_prediction_options(CLI::App* cmd, InputOptions& in) {
  auto* probs = cmd->add_option("--probs", in.probs, "Posterior matrix (.bin or .csv)");
  auto* logits = cmd->add_option("--logits", in.logits, "Logit matrix (.bin or .csv)");
  probs->excludes(logits);
  cmd->add_option("--delta", in.delta,
                  "Temperature for --logits: a number or a file with one value per row")
      ->capture_default_str();
}

void add_prior_options(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--source-prior", in.source_prior, "Training class prior, one value per line");
  cmd->add_option("--train-labels", in.train_labels,
                  "Training labels; the source prior is estimated from them");
  cmd->add_option("--target-prior", in.target_prior, "Target class prior file or 'uniform'")
      ->capture_default_str();
}

void add_search_options(CLI::App* cmd, SearchOptions& s) {
  cmd->add_option("--metric", s.metric, "Metric to maximise")
      ->check(CLI::IsMember({"accuracy", "mean_accuracy", "mean_iou"}))
      ->capture_default_str();
  cmd->add_option("--low", s.config.low, "Lower end of the lambda range")->capture_default_str();
  cmd->add_option("--high", s.config.high, "Initial upper end of the lambda range")
      ->capture_default_str();
  cmd->add_option("--prec", s.config.prec, "Grid spacing")->capture_default_str();
  cmd->add_option("--max-high", s.config.max_high, "Cap for the range expansion")
      ->capture_default_str();
  cmd->add_flag("--grid", s.grid, "Also evaluate the full grid and write it to curve.csv");
}

fs::path prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw CliFailure(kExitIo, "cannot create output directory " + dir);
  }
  return fs::path(dir);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw CliFailure(kExitIo, "cannot write " + path.string());
}

Json parse_report(const imbcal_report* report) {
  return Json::parse(imbcal_report_json(report));
}

// Returns a probability matrix: --probs as is, or --logits through a
// temperature-scaled softmax.
Matrix load_posteriors(const InputOptions& in) {
  imbcal_matrix* raw = nullptr;
  if (!in.probs.empty()) {
    check(imbcal_matrix_load(in.probs.c_str(), IMBCAL_CONTENT_PROBS, &raw), "loading " + in.probs);
    Matrix m(raw);
    if (imbcal_matrix_content(m.get()) != IMBCAL_CONTENT_PROBS) {
      invalid(in.probs + " holds logits; pass it with --logits");
    }
    return m;
  }
  if (in.logits.empty()) invalid("one of --probs or --logits is required");
  check(imbcal_matrix_load(in.logits.c_str(), IMBCAL_CONTENT_LOGITS, &raw),
        "loading " + in.logits);
  Matrix logits(raw);
  if (imbcal_matrix_content(logits.get()) != IMBCAL_CONTENT_LOGITS) {
    invalid(in.logits + " holds probabilities; pass it with --probs");
  }
  std::vector<double> delta;
  if (auto scalar = parse_number(in.delta)) {
    delta.push_back(*scalar);
  } else {
    double* values = nullptr;
    size_t n = 0;
    check(imbcal_values_load(in.delta.c_str(), &values, &n), "loading " + in.delta);
    delta.assign(values, values + n);
    imbcal_values_free(values);
  }
  check(imbcal_temperature_scale(logits.get(), delta.data(), delta.size(), &raw),
        "temperature scaling");
  return Matrix(raw);
}

Labels load_labels(const std::string& path, size_t n_classes) {
  imbcal_labels* raw = nullptr;
  check(imbcal_labels_load(path.c_str(), n_classes, &raw), "loading " + path);
  return Labels(raw);
}

Prior load_source_prior(const InputOptions& in, size_t n_classes) {
  imbcal_prior* raw = nullptr;
  if (!in.source_prior.empty()) {
    check(imbcal_prior_load(in.source_prior.c_str(), n_classes, IMBCAL_PRIOR_SOURCE, &raw),
          "loading " + in.source_prior);
    return Prior(raw);
  }
  if (in.train_labels.empty()) invalid("one of --source-prior or --train-labels is required");
  Labels train = load_labels(in.train_labels, n_classes);
  check(imbcal_prior_estimate(train.get(), &raw), "estimating the source prior");
  return Prior(raw);
}

Prior load_target_prior(const std::string& spec, size_t n_classes) {
  imbcal_prior* raw = nullptr;
  check(imbcal_prior_load(spec.c_str(), n_classes, IMBCAL_PRIOR_TARGET, &raw),
        "loading target prior " + spec);
  return Prior(raw);
}

Json evaluation(const imbcal_matrix* probs, const imbcal_labels* labels) {
  imbcal_report* raw = nullptr;
  check(imbcal_evaluate(probs, labels, &raw), "evaluating");
  Report report(raw);
  return parse_report(report.get());
}

std::vector<double> prior_values(const imbcal_prior* p) {
  const double* data = imbcal_prior_data(p);
  return std::vector<double>(data, data + imbcal_prior_size(p));
}

Json search_json(const imbcal_search_summary& s, const std::string& metric) {
  Json j;
  j["metric"] = metric;
  j["lambda"] = s.lambda;
  j["score"] = s.score;
  j["evaluations"] = s.evaluations;
  j["hit_cap"] = s.hit_cap != 0;
  return j;
}

void print_metrics(const Json& metrics) {
  for (const char* key : {"accuracy", "mean_accuracy", "mean_iou"}) {
    const auto& v = metrics.at(key);
    std::printf("  %-14s %s\n", key, v.is_null() ? "n/a" : std::to_string(v.get<double>()).c_str());
  }
}

// ---- calibrate / search ------------------------------------------------------

struct SearchOutcome {
  imbcal_search_summary summary{};
  Curve curve;
  std::optional<double> grid_lambda;
};

SearchOutcome run_calibration_search(const imbcal_matrix* probs, const imbcal_labels* labels,
                                     const imbcal_prior* source, const imbcal_prior* target,
                                     const SearchOptions& opts) {
  const imbcal_metric metric = metric_from_name(opts.metric);
  SearchOutcome out;
  imbcal_curve* trace = nullptr;
  check(imbcal_search_calibration(probs, labels, source, target, metric, &opts.config,
                                  &out.summary, &trace),
        "searching lambda");
  out.curve.reset(trace);
  if (opts.grid) {
    double best = 0.0;
    imbcal_curve* grid = nullptr;
    check(imbcal_grid_calibration(probs, labels, source, target, metric, &opts.config, &best,
                                  &grid),
          "grid search");
    out.curve.reset(grid);
    out.grid_lambda = best;
  }
  return out;
}

int run_calibrate(const Command& c, bool always_search) {
  const fs::path dir = prepare_out_dir(c.out_dir);
  Matrix probs = load_posteriors(c.input);
  const size_t k = imbcal_matrix_cols(probs.get());
  Prior source = load_source_prior(c.input, k);
  Prior target = load_target_prior(c.input.target_prior, k);
  Labels labels;
  if (!c.input.labels.empty()) labels = load_labels(c.input.labels, k);

  Json report;
  report["command"] = always_search ? "search" : "calibrate";
  report["rows"] = imbcal_matrix_rows(probs.get());
  report["classes"] = k;
  report["source_prior"] = prior_values(source.get());
  report["target_prior"] = prior_values(target.get());

  double lambda = 0.0;
  if (always_search || c.lambda == "search") {
    if (!labels) invalid("lambda search needs --labels");
    SearchOutcome s =
        run_calibration_search(probs.get(), labels.get(), source.get(), target.get(), c.search);
    lambda = s.summary.lambda;
    Json sj = search_json(s.summary, c.search.metric);
    if (s.grid_lambda) sj["grid_lambda"] = *s.grid_lambda;
    sj["unimodal"] = imbcal_curve_is_unimodal(s.curve.get()) != 0;
    report["search"] = std::move(sj);
    write_text(dir / "curve.csv", imbcal_curve_csv(s.curve.get()));
    std::printf("best lambda %.6g (%s %.6f, %zu evaluations%s)\n", lambda, c.search.metric.c_str(),
                s.summary.score, s.summary.evaluations, s.summary.hit_cap ? ", hit cap" : "");
  } else if (auto fixed = parse_number(c.lambda)) {
    lambda = *fixed;
  } else {
    invalid("--lambda must be a number or 'search', got '" + c.lambda + "'");
  }
  report["lambda"] = lambda;

  imbcal_matrix* raw = nullptr;
  check(imbcal_calibrate(probs.get(), source.get(), target.get(), lambda, &raw), "calibrating");
  Matrix calibrated(raw);
  check(imbcal_matrix_save(calibrated.get(), (dir / "calibrated.bin").c_str()),
        "writing calibrated.bin");

  if (labels) {
    report["metrics"] = evaluation(calibrated.get(), labels.get());
    std::printf("calibrated at lambda %.6g\n", lambda);
    print_metrics(report["metrics"]);
  } else {
    report["metrics"] = nullptr;
  }
  write_text(dir / "report.json", report.dump(2) + "\n");
  return kExitOk;
}

// ---- eval -------------------------------------------------------------------

int run_eval(const Command& c) {
  const fs::path dir = prepare_out_dir(c.out_dir);
  if (c.input.labels.empty()) invalid("eval needs --labels");
  Matrix probs = load_posteriors(c.input);
  const size_t k = imbcal_matrix_cols(probs.get());
  Labels labels = load_labels(c.input.labels, k);
  Json report;
  report["command"] = "eval";
  report["rows"] = imbcal_matrix_rows(probs.get());
  report["classes"] = k;
  report["metrics"] = evaluation(probs.get(), labels.get());
  write_text(dir / "report.json", report.dump(2) + "\n");
  print_metrics(report["metrics"]);
  return kExitOk;
}

// ---- fuse -------------------------------------------------------------------

struct FuseOptions {
  std::vector<std::string> logits;
  std::vector<std::string> delta;
  std::vector<std::string> source_prior;
  std::vector<std::string> train_labels;
  std::vector<std::string> target_prior;
};

// Options given once apply to every modality.
const std::string* pick(const std::vector<std::string>& values, size_t i, size_t m,
                        const char* flag) {
  if (values.empty()) return nullptr;
  if (values.size() == 1) return &values.front();
  if (values.size() != m) {
    invalid(std::string(flag) + " given " + std::to_string(values.size()) + " times for " +
            std::to_string(m) + " modalities");
  }
  return &values[i];
}

struct FuseContext {
  const imbcal_fusion* fusion;
  const imbcal_labels* labels;
  std::string pointer;
};

imbcal_status fused_metric(double lambda, void* user_data, double* score) {
  const auto* ctx = static_cast<const FuseContext*>(user_data);
  imbcal_matrix* fused = nullptr;
  imbcal_status s = imbcal_fusion_run(ctx->fusion, lambda, &fused);
  if (s != IMBCAL_OK) return s;
  imbcal_report* report = nullptr;
  s = imbcal_evaluate(fused, ctx->labels, &report);
  imbcal_matrix_free(fused);
  if (s != IMBCAL_OK) return s;
  s = imbcal_report_number(report, ctx->pointer.c_str(), score);
  imbcal_report_free(report);
  return s;
}

int run_fuse(const Command& c, const FuseOptions& f) {
  const fs::path dir = prepare_out_dir(c.out_dir);
  const size_t m = f.logits.size();
  if (m == 0) invalid("fuse needs at least one --logits");

  imbcal_fusion* raw_fusion = nullptr;
  check(imbcal_fusion_create(&raw_fusion), "creating fusion");
  Fusion fusion(raw_fusion);
  size_t k = 0;
  Json modalities = Json::array();
  for (size_t i = 0; i < m; ++i) {
    imbcal_matrix* raw = nullptr;
    check(imbcal_matrix_load(f.logits[i].c_str(), IMBCAL_CONTENT_LOGITS, &raw),
          "loading " + f.logits[i]);
    Matrix logits(raw);
    k = imbcal_matrix_cols(logits.get());

    InputOptions in;
    if (const auto* v = pick(f.source_prior, i, m, "--source-prior")) in.source_prior = *v;
    if (const auto* v = pick(f.train_labels, i, m, "--train-labels")) in.train_labels = *v;
    const auto* target_spec = pick(f.target_prior, i, m, "--target-prior");
    Prior source = load_source_prior(in, k);
    Prior target = load_target_prior(target_spec ? *target_spec : "uniform", k);

    const auto* delta_spec = pick(f.delta, i, m, "--delta");
    std::vector<double> delta;
    if (delta_spec == nullptr) {
      delta.push_back(1.0);
    } else if (auto scalar = parse_number(*delta_spec)) {
      delta.push_back(*scalar);
    } else {
      double* values = nullptr;
      size_t n = 0;
      check(imbcal_values_load(delta_spec->c_str(), &values, &n), "loading " + *delta_spec);
      delta.assign(values, values + n);
      imbcal_values_free(values);
    }
    check(imbcal_fusion_add_modality(fusion.get(), logits.get(), delta.data(), delta.size(),
                                     source.get(), target.get()),
          "adding modality " + f.logits[i]);
    modalities.push_back({{"logits", f.logits[i]},
                          {"delta", delta.size() == 1 ? Json(delta.front()) : Json("per-sample")},
                          {"source_prior", prior_values(source.get())},
                          {"target_prior", prior_values(target.get())}});
  }

  Labels labels;
  if (!c.input.labels.empty()) labels = load_labels(c.input.labels, k);

  Json report;
  report["command"] = "fuse";
  report["modalities"] = std::move(modalities);

  double lambda = 0.0;
  if (c.lambda == "search") {
    if (!labels) invalid("lambda search needs --labels");
    FuseContext ctx{fusion.get(), labels.get(), "/" + c.search.metric};
    metric_from_name(c.search.metric);
    imbcal_search_summary summary{};
    imbcal_curve* trace = nullptr;
    check(imbcal_search_lambda(fused_metric, &ctx, &c.search.config, &summary, &trace),
          "searching lambda");
    Curve curve(trace);
    Json sj = search_json(summary, c.search.metric);
    if (c.search.grid) {
      double best = 0.0;
      imbcal_curve* grid = nullptr;
      check(imbcal_grid_search(fused_metric, &ctx, &c.search.config, &best, &grid),
            "grid search");
      curve.reset(grid);
      sj["grid_lambda"] = best;
    }
    report["search"] = std::move(sj);
    write_text(dir / "curve.csv", imbcal_curve_csv(curve.get()));
    lambda = summary.lambda;
  } else if (auto fixed = parse_number(c.lambda)) {
    lambda = *fixed;
  } else {
    invalid("--lambda must be a number or 'search', got '" + c.lambda + "'");
  }
  report["lambda"] = lambda;

  imbcal_matrix* raw = nullptr;
  check(imbcal_fusion_run(fusion.get(), lambda, &raw), "fusing");
  Matrix fused(raw);
  check(imbcal_matrix_save(fused.get(), (dir / "calibrated.bin").c_str()),
        "writing calibrated.bin");
  if (labels) {
    report["metrics"] = evaluation(fused.get(), labels.get());
    std::printf("fused %zu modalities at lambda %.6g\n", m, lambda);
    print_metrics(report["metrics"]);
  } else {
    report["metrics"] = nullptr;
  }
  write_text(dir / "report.json", report.dump(2) + "\n");
  return kExitOk;
}

// ---- toy --------------------------------------------------------------------

struct ToyOptions {
  std::string shape = "two_moons";
  imbcal_toy_config config = imbcal_toy_config_default(IMBCAL_TOY_TWO_MOONS);
  std::optional<double> noise;
  std::optional<double> learning_rate;
  bool svg = false;
};

int run_toy(const Command& c, ToyOptions t) {
  const fs::path dir = prepare_out_dir(c.out_dir);
  t.config.shape = t.shape == "circle" ? IMBCAL_TOY_CIRCLE : IMBCAL_TOY_TWO_MOONS;
  const imbcal_toy_config shape_defaults = imbcal_toy_config_default(t.config.shape);
  t.config.noise = t.noise.value_or(shape_defaults.noise);
  t.config.learning_rate = t.learning_rate.value_or(shape_defaults.learning_rate);
  t.config.metric = metric_from_name(c.search.metric);
  t.config.search = c.search.config;
  imbcal_toy_result* raw = nullptr;
  check(imbcal_toy_run(&t.config, &raw), "running toy experiment");
  ToyResult result(raw);
  check(imbcal_toy_result_save(result.get(), dir.c_str(), t.svg ? 1 : 0), "writing toy outputs");

  const Json report = parse_report(imbcal_toy_result_report(result.get()));
  std::printf("%s seed %llu: best lambda %.3g, test %s %.4f -> %.4f, minority area %s\n",
              t.shape.c_str(), static_cast<unsigned long long>(t.config.seed),
              report.at("best_lambda").get<double>(), c.search.metric.c_str(),
              report.at("test_metric_lambda0").get<double>(),
              report.at("test_metric_best").get<double>(),
              report.at("area_monotone").get<bool>() ? "monotone" : "NOT monotone");
  return kExitOk;
}

// ---- oracle -----------------------------------------------------------------

struct OracleOptions {
  std::string task;
  double resolution = 1e-3;
  uint64_t seed = 0;
};

int run_oracle(const Command& c, const OracleOptions& o) {
  const fs::path dir = prepare_out_dir(c.out_dir);
  imbcal_task* raw_task = nullptr;
  if (o.task.empty()) {
    check(imbcal_task_canonical(&raw_task), "building canonical task");
  } else {
    check(imbcal_task_load(o.task.c_str(), &raw_task), "loading " + o.task);
  }
  Task task(raw_task);
  imbcal_report* raw_report = nullptr;
  imbcal_curve* raw_curve = nullptr;
  check(imbcal_oracle_run(task.get(), o.resolution, o.seed, &raw_report, &raw_curve),
        "running oracle");
  Report report(raw_report);
  Curve curve(raw_curve);
  write_text(dir / "report.json", std::string(imbcal_report_json(report.get())) + "\n");
  write_text(dir / "curve.csv", imbcal_curve_csv(curve.get()));

  const Json j = parse_report(report.get());
  std::printf("%-12s %-12s %-10s %-10s\n", "rule", "threshold", "risk", "empirical");
  for (const auto& rule : j.at("rules")) {
    const auto& t = rule.at("threshold");
    std::printf("%-12s %-12s %-10.5f %-10.5f\n", rule.at("rule").get<std::string>().c_str(),
                t.is_number() ? std::to_string(t.get<double>()).c_str()
                              : t.dump().c_str(),
                rule.at("risk").get<double>(), rule.at("empirical_risk").get<double>());
  }
  std::printf("sweep best risk %.5f; certificate %s\n", j.at("sweep").at("best_risk").get<double>(),
              j.at("certificate_holds").get<bool>() ? "holds" : "FAILS");
  return j.at("certificate_holds").get<bool>() ? kExitOk : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Post-training prior calibration for imbalanced classifiers"};
  app.set_version_flag("--version", std::string(imbcal_version()));
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "INI file with one [section] per subcommand");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Command cmd;
  FuseOptions fuse;
  ToyOptions toy;
  OracleOptions oracle;

  auto* calibrate = app.add_subcommand("calibrate", "Apply prior calibration at a fixed lambda");
  add_out_dir(calibrate, cmd.out_dir);
  add_prediction_options(calibrate, cmd.input);
  add_prior_options(calibrate, cmd.input);
  calibrate->add_option("--labels", cmd.input.labels, "Labels for evaluation");
  calibrate->add_option("--lambda", cmd.lambda, "Interpolation weight, or 'search'")
      ->capture_default_str();
  add_search_options(calibrate, cmd.search);

  auto* search = app.add_subcommand("search", "Find the best lambda on validation data");
  add_out_dir(search, cmd.out_dir);
  add_prediction_options(search, cmd.input);
  add_prior_options(search, cmd.input);
  search->add_option("--labels", cmd.input.labels, "Validation labels")->required();
  add_search_options(search, cmd.search);

  auto* fuse_cmd = app.add_subcommand("fuse", "Calibrate and fuse several modalities");
  add_out_dir(fuse_cmd, cmd.out_dir);
  fuse_cmd->add_option("--logits", fuse.logits, "Logit matrix of one modality (repeatable)")
      ->required()
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  fuse_cmd->add_option("--delta", fuse.delta, "Temperature per modality: number or file")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  fuse_cmd->add_option("--source-prior", fuse.source_prior, "Source prior per modality")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  fuse_cmd->add_option("--train-labels", fuse.train_labels, "Training labels per modality")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  fuse_cmd->add_option("--target-prior", fuse.target_prior, "Target prior per modality")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  fuse_cmd->add_option("--labels", cmd.input.labels, "Labels for evaluation and search");
  fuse_cmd->add_option("--lambda", cmd.lambda, "Interpolation weight, or 'search'")
      ->capture_default_str();
  add_search_options(fuse_cmd, cmd.search);

  auto* eval = app.add_subcommand("eval", "Evaluate posteriors against labels");
  add_out_dir(eval, cmd.out_dir);
  add_prediction_options(eval, cmd.input);
  eval->add_option("--labels", cmd.input.labels, "Ground-truth labels")->required();

  auto* toy_cmd = app.add_subcommand("toy", "Train the two-dimensional toy experiment");
  add_out_dir(toy_cmd, cmd.out_dir);
  toy_cmd->add_option("--shape", toy.shape, "Dataset shape")
      ->check(CLI::IsMember({"two_moons", "circle"}))
      ->capture_default_str();
  toy_cmd->add_option("--majority", toy.config.majority_size, "Majority class size")
      ->capture_default_str();
  toy_cmd->add_option("--ratio", toy.config.imbalance_ratio, "Imbalance ratio")
      ->capture_default_str();
  toy_cmd->add_option("--noise", toy.noise, "Gaussian feature noise (default 0.1)");
  toy_cmd->add_option("--seed", toy.config.seed, "Random seed")->capture_default_str();
  toy_cmd->add_option("--val-fraction", toy.config.val_fraction)->capture_default_str();
  toy_cmd->add_option("--test-fraction", toy.config.test_fraction)->capture_default_str();
  toy_cmd->add_option("--hidden", toy.config.hidden_width, "Hidden layer width")
      ->capture_default_str();
  toy_cmd->add_option("--epochs", toy.config.epochs)->capture_default_str();
  toy_cmd->add_option("--lr", toy.learning_rate,
                      "Learning rate (default 0.2 for two_moons, 0.05 for circle)");
  toy_cmd->add_option("--resolution", toy.config.grid_resolution, "Boundary grid cells per side")
      ->capture_default_str();
  toy_cmd->add_flag("--svg", toy.svg, "Also write boundary.svg");
  add_search_options(toy_cmd, cmd.search);

  auto* oracle_cmd = app.add_subcommand("oracle", "Bayes-risk check on a Gaussian task");
  add_out_dir(oracle_cmd, cmd.out_dir);
  oracle_cmd->add_option("--task", oracle.task, "Task file; the canonical task when omitted");
  oracle_cmd->add_option("--resolution", oracle.resolution, "Threshold sweep step")
      ->capture_default_str();
  oracle_cmd->add_option("--seed", oracle.seed, "Seed for the Monte Carlo check")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::FileError& e) {
    std::cerr << "imbcal: " << e.what() << "\n";
    return kExitIo;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*calibrate) return run_calibrate(cmd, false);
    if (*search) return run_calibrate(cmd, true);
    if (*fuse_cmd) return run_fuse(cmd, fuse);
    if (*eval) return run_eval(cmd);
    if (*toy_cmd) return run_toy(cmd, toy);
    if (*oracle_cmd) return run_oracle(cmd, oracle);
  } catch (const CliFailure& e) {
    std::cerr << "imbcal: " << e.what() << "\n";
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "imbcal: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitValidation;
}
