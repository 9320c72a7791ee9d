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
#include "fusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "error.hpp"

namespace imbcal {

PosteriorMatrix calibrate_modality(const ModalityInput& m, double lambda, double epsilon) {
  const PosteriorMatrix flattened = temperature_scale(m.logits, m.delta);
  const PosteriorMatrix rebalanced = rebalance(flattened, m.source_prior, m.target_prior, epsilon);
  return interpolate(flattened, rebalanced, lambda, epsilon);
}

PosteriorMatrix noisy_or_fuse(std::span<const PosteriorMatrix> posteriors) {
  if (posteriors.empty()) throw ValidationError("fusion: no modalities");
  const std::size_t n = posteriors.front().n_samples();
  const std::size_t k = posteriors.front().n_classes();
  for (const auto& p : posteriors) {
    if (p.n_samples() != n || p.n_classes() != k) {
      throw ValidationError("fusion: modality shapes differ");
    }
  }

  Matrix out(n, k);
  std::vector<double> terms(posteriors.size());
  for (std::size_t r = 0; r < n; ++r) {
    auto dst = out.row(r);
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      // log prod (1 - p) via log1p keeps small p exact. Terms are summed in
      // sorted order so the result does not depend on modality order.
      for (std::size_t m = 0; m < posteriors.size(); ++m) {
        terms[m] = std::log1p(-posteriors[m](r, c));
      }
      std::sort(terms.begin(), terms.end());
      double log_miss = 0.0;
      for (double t : terms) log_miss += t;
      dst[c] = -std::expm1(log_miss);
      total += dst[c];
    }
    // Each modality row sums to 1, so some entry is >= 1/K and total > 0.
    if (!(total > 0.0) || !std::isfinite(total)) {
      throw NumericError("fusion: degenerate noisy-or normalizer in row " + std::to_string(r));
    }
    for (double& v : dst) v /= total;
  }
  return PosteriorMatrix(std::move(out), PosteriorRole::kFused);
}

PosteriorMatrix fuse(std::span<const ModalityInput> modalities, double lambda, double epsilon) {
  if (modalities.empty()) throw ValidationError("fusion: no modalities");
  std::vector<PosteriorMatrix> calibrated;
  calibrated.reserve(modalities.size());
  for (const auto& m : modalities) calibrated.push_back(calibrate_modality(m, lambda, epsilon));
  return noisy_or_fuse(calibrated);
}

}  // namespace imbcal
