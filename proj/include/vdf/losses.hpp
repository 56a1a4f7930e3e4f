/* Copyright 2026 The VDF Authors. All Rights Reserved.

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

#pragma once

// Adversarial objective: multi-scale segmentation term, layered perceptual
// term, their combination, and the misclassification statistic.

#include <array>
#include <vector>

#include "vdf/autodiff.hpp"
#include "vdf/models.hpp"
#include "vdf/tensor.hpp"

namespace vdf {

struct LossConfig {
  std::vector<double> scales{2.0, 1.5, 1.0, 0.75, 0.5};
  std::vector<std::size_t> target_classes{kFaceClass};
  double epsilon = 1e-8;
  std::array<double, FeatureExtractor::kTaps> layer_weights{1.0, 0.75, 0.5, 0.25};
  bool perceptual_on = true;
  bool multiscale_on = true;

  /// Throws DomainError on an empty or non-positive scale list, negative
  /// weights, a non-positive epsilon or an empty target set.
  void validate() const;
};

/// The attack targets. Both are borrowed and must outlive every call.
struct TargetModels {
  const PixelClassifier* classifier = nullptr;
  const FeatureExtractor* features = nullptr;
};

struct LossBreakdown {
  std::vector<double> seg_terms;   // one per scale; 0 where degenerate
  std::vector<bool> degenerate;    // resized mask empty at that scale
  double perceptual = 0.0;
  double total = 0.0;
  std::vector<double> rates;       // misclassification per scale
};

/// Graph handles of one loss evaluation on a tape.
struct LossGraph {
  ad::Var total;
  LossBreakdown breakdown;
};

/// Per-scale mean over masked pixels of log(1 - sum_tgt P + eps) plus its
/// rate; the probability map is reused for the rate, so no second forward
/// pass is needed.
struct ScaleTerm {
  ad::Var term;  // invalid when degenerate
  double rate = 1.0;
  bool degenerate = false;
};
ScaleTerm seg_scale_term(const ad::Var& perturbed, const Mask& mask, const PixelClassifier& model,
                         double scale, const LossConfig& cfg);

/// Sum over scales of seg_scale_term. Degenerate scales contribute 0.
ad::Var multiscale_seg_loss(const ad::Var& perturbed, const Mask& mask, const PixelClassifier& model,
                            const LossConfig& cfg, LossBreakdown* breakdown = nullptr);

/// sum_l w_l * mean((phi_l(x') - phi_l(y))^2) against precomputed clean taps.
ad::Var perceptual_loss(const ad::Var& perturbed, const std::vector<Tensor>& clean_taps,
                        const FeatureExtractor& fx, const LossConfig& cfg);
double perceptual_loss(const Tensor& perturbed, const Tensor& clean, const FeatureExtractor& fx,
                       const LossConfig& cfg);

/// perceptual - multiscale_seg on the perturbed image's tape; disabled terms
/// are exactly zero. Rates are filled for every scale either way.
LossGraph build_total_loss(const ad::Var& perturbed, const std::vector<Tensor>& clean_taps,
                           const Mask& mask, const TargetModels& models, const LossConfig& cfg);

/// Forward-only breakdown.
LossBreakdown total_loss(const Tensor& clean, const Tensor& perturbed, const Mask& mask,
                         const TargetModels& models, const LossConfig& cfg);

struct ScaleRates {
  std::vector<double> rates;
  std::vector<bool> degenerate;  // empty resized mask; rate reported as 1.0
};

/// Fraction of masked pixels whose argmax class leaves the target set, per
/// scale.
ScaleRates misclassification_rates(const Tensor& perturbed, const Mask& mask,
                                   const PixelClassifier& model, const LossConfig& cfg);

/// Rate of one probability map against an already-resized mask.
double misclassification_rate(const Tensor& probabilities, const Mask& mask,
                              const std::vector<std::size_t>& target_classes);

}  // namespace vdf
