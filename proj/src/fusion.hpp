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
#ifndef IMBCAL_FUSION_HPP_
#define IMBCAL_FUSION_HPP_

#include <span>
#include <vector>

#include "calibrate.hpp"
#include "core.hpp"

namespace imbcal {

// One modality's logits together with its temperature and prior pair.
struct ModalityInput {
  LogitMatrix logits;
  TemperatureSpec delta;
  PriorVector source_prior;
  PriorVector target_prior;
};

// softmax(logits * delta) -> rebalance -> interpolate(lambda).
PosteriorMatrix calibrate_modality(const ModalityInput& m, double lambda,
                                   double epsilon = kDefaultEpsilon);

// Noisy-or combination: entry k proportional to 1 - prod_m (1 - p_m[k]).
PosteriorMatrix noisy_or_fuse(std::span<const PosteriorMatrix> posteriors);

// Per-modality calibration with a shared lambda followed by noisy-or.
PosteriorMatrix fuse(std::span<const ModalityInput> modalities, double lambda,
                     double epsilon = kDefaultEpsilon);

}  // namespace imbcal

#endif  // IMBCAL_FUSION_HPP_
