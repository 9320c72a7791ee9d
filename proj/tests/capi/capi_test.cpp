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
// Exercises the shared library strictly through its C interface.

#include "imbcal/imbcal.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace {

namespace fs = std::filesystem;

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

Matrix make_matrix(std::vector<double> v, size_t rows, size_t cols, imbcal_content content) {
  imbcal_matrix* m = nullptr;
  EXPECT_EQ(imbcal_matrix_create(v.data(), rows, cols, content, &m), IMBCAL_OK)
      << imbcal_last_error();
  return Matrix(m);
}

Prior make_prior(std::vector<double> v, imbcal_prior_role role) {
  imbcal_prior* p = nullptr;
  EXPECT_EQ(imbcal_prior_create(v.data(), v.size(), role, &p), IMBCAL_OK) << imbcal_last_error();
  return Prior(p);
}

Labels make_labels(std::vector<uint32_t> v, size_t k) {
  imbcal_labels* l = nullptr;
  EXPECT_EQ(imbcal_labels_create(v.data(), v.size(), k, &l), IMBCAL_OK) << imbcal_last_error();
  return Labels(l);
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "imbcal_capi_test";
  fs::create_directories(dir);
  return dir / name;
}

TEST(CApiTest, VersionAndStatusNames) {
  EXPECT_GT(std::strlen(imbcal_version()), 0u);
  EXPECT_STREQ(imbcal_status_name(IMBCAL_OK), "ok");
  EXPECT_STRNE(imbcal_status_name(IMBCAL_ERR_IO), imbcal_status_name(IMBCAL_ERR_VALIDATION));
}

TEST(CApiTest, RebalanceHandCase) {
  Matrix p = make_matrix({0.7, 0.3}, 1, 2, IMBCAL_CONTENT_PROBS);
  Prior s = make_prior({0.9, 0.1}, IMBCAL_PRIOR_SOURCE);
  Prior t = make_prior({0.5, 0.5}, IMBCAL_PRIOR_TARGET);
  imbcal_matrix* out = nullptr;
  ASSERT_EQ(imbcal_rebalance(p.get(), s.get(), t.get(), &out), IMBCAL_OK);
  Matrix r(out);
  EXPECT_NEAR(imbcal_matrix_data(r.get())[1], 0.7941, 1e-4);
  EXPECT_EQ(imbcal_matrix_content(r.get()), IMBCAL_CONTENT_PROBS);

  ASSERT_EQ(imbcal_calibrate(p.get(), s.get(), t.get(), 1.0, &out), IMBCAL_OK);
  Matrix c(out);
  EXPECT_NEAR(imbcal_matrix_data(c.get())[1], imbcal_matrix_data(r.get())[1], 1e-12);

  ASSERT_EQ(imbcal_interpolate(p.get(), r.get(), 0.0, &out), IMBCAL_OK);
  Matrix i(out);
  EXPECT_NEAR(imbcal_matrix_data(i.get())[0], 0.7, 1e-12);
}

TEST(CApiTest, SoftmaxAndTemperature) {
  Matrix z = make_matrix({2.0, 0.0}, 1, 2, IMBCAL_CONTENT_LOGITS);
  imbcal_matrix* out = nullptr;
  const double half = 0.5;
  ASSERT_EQ(imbcal_temperature_scale(z.get(), &half, 1, &out), IMBCAL_OK);
  Matrix p(out);
  EXPECT_NEAR(imbcal_matrix_data(p.get())[0], 0.7311, 1e-4);
  ASSERT_EQ(imbcal_softmax(z.get(), &out), IMBCAL_OK);
  Matrix q(out);
  EXPECT_NEAR(imbcal_matrix_data(q.get())[0], 1.0 / (1.0 + std::exp(-2.0)), 1e-15);
}

TEST(CApiTest, ContentMismatchIsValidationError) {
  Matrix z = make_matrix({2.0, 0.0}, 1, 2, IMBCAL_CONTENT_LOGITS);
  Prior s = make_prior({0.9, 0.1}, IMBCAL_PRIOR_SOURCE);
  imbcal_matrix* out = nullptr;
  EXPECT_EQ(imbcal_rebalance(z.get(), s.get(), s.get(), &out), IMBCAL_ERR_VALIDATION);
  EXPECT_EQ(out, nullptr);
  EXPECT_NE(std::string(imbcal_last_error()).find("logit"), std::string::npos);
}

TEST(CApiTest, InvalidInputsAreReported) {
  imbcal_matrix* out = nullptr;
  const double bad[] = {0.5, 0.6};
  EXPECT_EQ(imbcal_matrix_create(bad, 1, 2, IMBCAL_CONTENT_PROBS, &out), IMBCAL_ERR_VALIDATION);
  EXPECT_EQ(imbcal_matrix_create(nullptr, 1, 2, IMBCAL_CONTENT_PROBS, &out),
            IMBCAL_ERR_VALIDATION);
  EXPECT_GT(std::strlen(imbcal_last_error()), 0u);
  EXPECT_EQ(imbcal_matrix_load("/nonexistent/file.bin", IMBCAL_CONTENT_PROBS, &out),
            IMBCAL_ERR_IO);
  imbcal_prior* prior = nullptr;
  const double zero_source[] = {1.0, 0.0};
  EXPECT_EQ(imbcal_prior_create(zero_source, 2, IMBCAL_PRIOR_SOURCE, &prior),
            IMBCAL_ERR_VALIDATION);
}

TEST(CApiTest, EvaluateReport) {
  Matrix p = make_matrix({0.9, 0.1, 0.4, 0.6, 0.2, 0.8}, 3, 2, IMBCAL_CONTENT_PROBS);
  Labels y = make_labels({0, 0, 1}, 2);
  imbcal_report* raw = nullptr;
  ASSERT_EQ(imbcal_evaluate(p.get(), y.get(), &raw), IMBCAL_OK);
  Report r(raw);
  double acc = 0.0, macc = 0.0, recall1 = 0.0;
  ASSERT_EQ(imbcal_report_number(r.get(), "/accuracy", &acc), IMBCAL_OK);
  ASSERT_EQ(imbcal_report_number(r.get(), "/mean_accuracy", &macc), IMBCAL_OK);
  ASSERT_EQ(imbcal_report_number(r.get(), "/per_class_recall/1", &recall1), IMBCAL_OK);
  EXPECT_DOUBLE_EQ(acc, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(macc, 0.75);
  EXPECT_DOUBLE_EQ(recall1, 1.0);
  EXPECT_EQ(imbcal_report_number(r.get(), "/missing", &acc), IMBCAL_ERR_VALIDATION);
  EXPECT_NE(std::string(imbcal_report_json(r.get())).find("mean_iou"), std::string::npos);
  EXPECT_GT(std::strlen(imbcal_report_csv_row(r.get())), 0u);
}

TEST(CApiTest, ArgmaxAndEstimatedPrior) {
  Matrix p = make_matrix({0.2, 0.8, 0.5, 0.5}, 2, 2, IMBCAL_CONTENT_PROBS);
  imbcal_labels* raw = nullptr;
  ASSERT_EQ(imbcal_argmax(p.get(), &raw), IMBCAL_OK);
  Labels y(raw);
  ASSERT_EQ(imbcal_labels_size(y.get()), 2u);
  EXPECT_EQ(imbcal_labels_data(y.get())[0], 1u);
  EXPECT_EQ(imbcal_labels_data(y.get())[1], 0u);

  Labels train = make_labels({0, 0, 0, 1}, 2);
  imbcal_prior* prior = nullptr;
  ASSERT_EQ(imbcal_prior_estimate(train.get(), &prior), IMBCAL_OK);
  Prior ps(prior);
  EXPECT_DOUBLE_EQ(imbcal_prior_data(ps.get())[0], 0.75);
}

imbcal_status parabola(double lambda, void* user, double* score) {
  const double peak = *static_cast<double*>(user);
  *score = -(lambda - peak) * (lambda - peak);
  return IMBCAL_OK;
}

imbcal_status failing(double lambda, void*, double* score) {
  *score = 0.0;
  return lambda > 0.5 ? IMBCAL_ERR_IO : IMBCAL_OK;
}

TEST(CApiTest, SearchWithCallback) {
  double peak = 0.7;
  imbcal_search_config cfg = imbcal_search_config_default();
  imbcal_search_summary summary{};
  imbcal_curve* raw = nullptr;
  ASSERT_EQ(imbcal_search_lambda(parabola, &peak, &cfg, &summary, &raw), IMBCAL_OK);
  Curve trace(raw);
  EXPECT_NEAR(summary.lambda, 0.7, 1e-12);
  EXPECT_EQ(summary.hit_cap, 0);
  EXPECT_EQ(imbcal_curve_size(trace.get()), summary.evaluations);
  double prev = -1.0;
  for (size_t i = 0; i < imbcal_curve_size(trace.get()); ++i) {
    double x = 0.0;
    ASSERT_EQ(imbcal_curve_point(trace.get(), i, &x, nullptr), IMBCAL_OK);
    EXPECT_GT(x, prev);
    prev = x;
  }

  double best = -1.0;
  ASSERT_EQ(imbcal_grid_search(parabola, &peak, &cfg, &best, &raw), IMBCAL_OK);
  Curve grid(raw);
  EXPECT_NEAR(best, 0.7, 1e-12);
  EXPECT_EQ(imbcal_curve_size(grid.get()), 21u);
  EXPECT_EQ(imbcal_curve_is_unimodal(grid.get()), 1);
  EXPECT_EQ(std::string(imbcal_curve_csv(grid.get())).substr(0, 13), "lambda,score\n");
}

TEST(CApiTest, CallbackErrorsPropagate) {
  imbcal_search_summary summary{};
  EXPECT_EQ(imbcal_search_lambda(failing, nullptr, nullptr, &summary, nullptr), IMBCAL_ERR_IO);
  EXPECT_NE(std::string(imbcal_last_error()).find("callback"), std::string::npos);
}

TEST(CApiTest, SearchCalibration) {
  // Minority rows sit just below the default boundary; rebalancing rescues them.
  std::vector<double> v;
  std::vector<uint32_t> y;
  for (int i = 0; i < 90; ++i) {
    v.insert(v.end(), {0.95, 0.05});
    y.push_back(0);
  }
  for (int i = 0; i < 10; ++i) {
    v.insert(v.end(), {0.6, 0.4});
    y.push_back(1);
  }
  Matrix p = make_matrix(v, 100, 2, IMBCAL_CONTENT_PROBS);
  Labels labels = make_labels(y, 2);
  Prior s = make_prior({0.9, 0.1}, IMBCAL_PRIOR_SOURCE);
  Prior t = make_prior({0.5, 0.5}, IMBCAL_PRIOR_TARGET);
  imbcal_search_summary summary{};
  ASSERT_EQ(imbcal_search_calibration(p.get(), labels.get(), s.get(), t.get(),
                                      IMBCAL_METRIC_MEAN_ACCURACY, nullptr, &summary, nullptr),
            IMBCAL_OK);
  EXPECT_DOUBLE_EQ(summary.score, 1.0);
  double best = 0.0;
  ASSERT_EQ(imbcal_grid_calibration(p.get(), labels.get(), s.get(), t.get(),
                                    IMBCAL_METRIC_MEAN_ACCURACY, nullptr, &best, nullptr),
            IMBCAL_OK);
  EXPECT_DOUBLE_EQ(best, summary.lambda);
}

TEST(CApiTest, FusionPipeline) {
  Matrix a = make_matrix({2.0, 0.0, 0.0, 1.0}, 2, 2, IMBCAL_CONTENT_LOGITS);
  Matrix b = make_matrix({0.5, 0.0, 0.0, 3.0}, 2, 2, IMBCAL_CONTENT_LOGITS);
  Prior u = make_prior({0.5, 0.5}, IMBCAL_PRIOR_SOURCE);
  Prior t = make_prior({0.5, 0.5}, IMBCAL_PRIOR_TARGET);
  imbcal_fusion* raw = nullptr;
  ASSERT_EQ(imbcal_fusion_create(&raw), IMBCAL_OK);
  Fusion f(raw);
  const double one = 1.0;
  ASSERT_EQ(imbcal_fusion_add_modality(f.get(), a.get(), &one, 1, u.get(), t.get()), IMBCAL_OK);
  ASSERT_EQ(imbcal_fusion_add_modality(f.get(), b.get(), &one, 1, u.get(), t.get()), IMBCAL_OK);
  EXPECT_EQ(imbcal_fusion_size(f.get()), 2u);

  imbcal_matrix* out = nullptr;
  ASSERT_EQ(imbcal_fusion_run(f.get(), 0.0, &out), IMBCAL_OK);
  Matrix fused(out);
  ASSERT_EQ(imbcal_fusion_calibrated(f.get(), 0, 0.0, &out), IMBCAL_OK);
  Matrix pa(out);
  ASSERT_EQ(imbcal_fusion_calibrated(f.get(), 1, 0.0, &out), IMBCAL_OK);
  Matrix pb(out);
  const imbcal_matrix* parts[] = {pa.get(), pb.get()};
  ASSERT_EQ(imbcal_noisy_or(parts, 2, &out), IMBCAL_OK);
  Matrix manual(out);
  for (size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(imbcal_matrix_data(fused.get())[i], imbcal_matrix_data(manual.get())[i], 1e-15);
  }

  Matrix wrong = make_matrix({1.0, 0.0, 0.0}, 1, 3, IMBCAL_CONTENT_LOGITS);
  Prior u3 = make_prior({1.0 / 3, 1.0 / 3, 1.0 / 3}, IMBCAL_PRIOR_SOURCE);
  EXPECT_EQ(imbcal_fusion_add_modality(f.get(), wrong.get(), &one, 1, u3.get(), u3.get()),
            IMBCAL_ERR_VALIDATION);
}

TEST(CApiTest, SaveLoadRoundTrip) {
  Matrix p = make_matrix({0.1, 0.9, 0.3, 0.7}, 2, 2, IMBCAL_CONTENT_PROBS);
  const fs::path bin = scratch("round.bin");
  ASSERT_EQ(imbcal_matrix_save(p.get(), bin.c_str()), IMBCAL_OK);
  imbcal_matrix* raw = nullptr;
  ASSERT_EQ(imbcal_matrix_load(bin.c_str(), IMBCAL_CONTENT_LOGITS, &raw), IMBCAL_OK);
  Matrix back(raw);
  EXPECT_EQ(imbcal_matrix_content(back.get()), IMBCAL_CONTENT_PROBS);
  EXPECT_EQ(std::memcmp(imbcal_matrix_data(p.get()), imbcal_matrix_data(back.get()),
                        4 * sizeof(double)),
            0);
}

TEST(CApiTest, ValuesFile) {
  const fs::path path = scratch("delta.txt");
  std::ofstream(path) << "# deltas\n0.5\n2\n";
  double* values = nullptr;
  size_t n = 0;
  ASSERT_EQ(imbcal_values_load(path.c_str(), &values, &n), IMBCAL_OK);
  ASSERT_EQ(n, 2u);
  EXPECT_DOUBLE_EQ(values[1], 2.0);
  imbcal_values_free(values);
}

TEST(CApiTest, OracleCanonical) {
  imbcal_task* raw = nullptr;
  ASSERT_EQ(imbcal_task_canonical(&raw), IMBCAL_OK);
  Task task(raw);
  imbcal_report* rep = nullptr;
  imbcal_curve* curve = nullptr;
  ASSERT_EQ(imbcal_oracle_run(task.get(), 1e-2, 3, &rep, &curve), IMBCAL_OK);
  Report report(rep);
  Curve risk(curve);
  double reb = 0.0, src = 0.0, ok = 0.0;
  ASSERT_EQ(imbcal_report_number(report.get(), "/rules/0/risk", &reb), IMBCAL_OK);
  ASSERT_EQ(imbcal_report_number(report.get(), "/rules/1/risk", &src), IMBCAL_OK);
  ASSERT_EQ(imbcal_report_number(report.get(), "/certificate_holds", &ok), IMBCAL_OK);
  EXPECT_NEAR(reb, 0.15866, 1e-4);
  EXPECT_NEAR(src, 0.27861, 1e-4);
  EXPECT_EQ(ok, 1.0);
  EXPECT_EQ(std::string(imbcal_curve_csv(risk.get())).substr(0, 15), "threshold,risk\n");

  EXPECT_EQ(imbcal_task_parse("means = 0\n", &raw), IMBCAL_ERR_VALIDATION);
  EXPECT_EQ(imbcal_task_load("/nonexistent/task.txt", &raw), IMBCAL_ERR_IO);
}

TEST(CApiTest, ToyDefaultsDependOnShape) {
  const imbcal_toy_config moons = imbcal_toy_config_default(IMBCAL_TOY_TWO_MOONS);
  const imbcal_toy_config circle = imbcal_toy_config_default(IMBCAL_TOY_CIRCLE);
  EXPECT_EQ(moons.shape, IMBCAL_TOY_TWO_MOONS);
  EXPECT_EQ(circle.shape, IMBCAL_TOY_CIRCLE);
  EXPECT_EQ(moons.learning_rate, 0.2);
  EXPECT_EQ(circle.learning_rate, 0.05);
  EXPECT_EQ(moons.noise, 0.1);
  EXPECT_EQ(circle.epochs, 2000u);
  EXPECT_EQ(circle.majority_size, 2500u);
}

TEST(CApiTest, SmallToyRun) {
  imbcal_toy_config cfg = imbcal_toy_config_default(IMBCAL_TOY_TWO_MOONS);
  cfg.majority_size = 300;
  cfg.hidden_width = 8;
  cfg.epochs = 100;
  cfg.grid_resolution = 20;
  imbcal_toy_result* raw = nullptr;
  ASSERT_EQ(imbcal_toy_run(&cfg, &raw), IMBCAL_OK) << imbcal_last_error();
  ToyResult result(raw);
  double minority = 0.0;
  ASSERT_EQ(imbcal_report_number(imbcal_toy_result_report(result.get()), "/minority_size",
                                 &minority),
            IMBCAL_OK);
  EXPECT_EQ(minority, 33.0);
  const fs::path dir = scratch("toy");
  fs::create_directories(dir);
  ASSERT_EQ(imbcal_toy_result_save(result.get(), dir.c_str(), 1), IMBCAL_OK);
  for (const char* name : {"dataset.csv", "boundary.csv", "curve.csv", "report.json",
                           "boundary.svg"}) {
    EXPECT_TRUE(fs::exists(dir / name)) << name;
  }
  cfg.imbalance_ratio = 0.0;
  EXPECT_EQ(imbcal_toy_run(&cfg, &raw), IMBCAL_ERR_VALIDATION);
}

}  // namespace
