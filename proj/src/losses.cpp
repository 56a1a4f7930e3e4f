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

#include "vdf/losses.hpp"

#include <algorithm>
#include <cmath>

#include "vdf/error.hpp"

namespace vdf {
namespace {

bool is_target(std::size_t cls, const std::vector<std::size_t>& targets) {
  return std::find(targets.begin(), targets.end(), cls) != targets.end();
}

ad::Var zero_scalar(ad::Tape& t) { return t.constant(Tensor::scalar(0.0)); }

}  // namespace

void LossConfig::validate() const {
  if (scales.empty()) throw DomainError("scale list must not be empty");
  for (double s : scales) {
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("scales must be positive and finite");
  }
  if (target_classes.empty()) throw DomainError("target class set must not be empty");
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  for (double w : layer_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("layer weights must be non-negative");
  }
}

double misclassification_rate(const Tensor& probabilities, const Mask& mask,
                              const std::vector<std::size_t>& target_classes) {
  const Shape& s = probabilities.shape();
  if (mask.height() != s.h || mask.width() != s.w) {
    throw ShapeError("mask does not match probability map " + s.str());
  }
  std::size_t total = 0, missed = 0;
  const std::vector<std::uint8_t> cls = argmax_classes(probabilities);
  for (std::size_t p = 0; p < cls.size(); ++p) {
    if (!mask.bits()[p]) continue;
    ++total;
    missed += is_target(cls[p], target_classes) ? 0 : 1;
  }
  if (total == 0) throw DomainError("misclassification rate over an empty mask");
  return static_cast<double>(missed) / static_cast<double>(total);
}

ScaleTerm seg_scale_term(const ad::Var& perturbed, const Mask& mask, const PixelClassifier& model,
                         double scale, const LossConfig& cfg) {
  const Shape& s = perturbed.shape();
  if (mask.height() != s.h || mask.width() != s.w) {
    throw ShapeError("mask does not match frame " + s.str());
  }
  for (std::size_t c : cfg.target_classes) {
    if (c >= model.classes()) throw DomainError("target class outside the model's class set");
  }
  const std::size_t oh = scaled_extent(s.h, scale), ow = scaled_extent(s.w, scale);
  const Mask resized_mask = resize_nearest_to(mask, oh, ow);
  ScaleTerm out;
  if (resized_mask.empty()) {
    out.degenerate = true;
    return out;
  }
  const ad::Var resized = ad::resize_bilinear_to(perturbed, oh, ow);
  const ad::Var probs = model.probabilities(resized);
  out.rate = misclassification_rate(probs.value(), resized_mask, cfg.target_classes);
  const ad::Var target = ad::channel_sum(probs, cfg.target_classes);
  const ad::Var kept = ad::add_scalar(ad::scale(target, -1.0), 1.0 + cfg.epsilon);
  out.term = ad::mean_masked(ad::log_stable(kept), resized_mask);
  return out;
}

ad::Var multiscale_seg_loss(const ad::Var& perturbed, const Mask& mask, const PixelClassifier& model,
                            const LossConfig& cfg, LossBreakdown* breakdown) {
  cfg.validate();
  ad::Tape& t = perturbed.tape();
  ad::Var sum = zero_scalar(t);
  bool first = true;
  for (double scale : cfg.scales) {
    const ScaleTerm st = seg_scale_term(perturbed, mask, model, scale, cfg);
    if (breakdown != nullptr) {
      breakdown->seg_terms.push_back(st.degenerate ? 0.0 : st.term.value().item());
      breakdown->degenerate.push_back(st.degenerate);
      breakdown->rates.push_back(st.rate);
    }
    if (st.degenerate) continue;
    sum = first ? st.term : ad::add(sum, st.term);
    first = false;
  }
  return sum;
}

ad::Var perceptual_loss(const ad::Var& perturbed, const std::vector<Tensor>& clean_taps,
                        const FeatureExtractor& fx, const LossConfig& cfg) {
  if (clean_taps.size() != FeatureExtractor::kTaps) throw ShapeError("expected four clean taps");
  const std::vector<ad::Var> taps = fx.taps(perturbed);
  ad::Var sum;
  for (std::size_t l = 0; l < taps.size(); ++l) {
    const ad::Var term = ad::scale(ad::mean_squared_distance(taps[l], clean_taps[l]), cfg.layer_weights[l]);
    sum = l == 0 ? term : ad::add(sum, term);
  }
  return sum;
}

double perceptual_loss(const Tensor& perturbed, const Tensor& clean, const FeatureExtractor& fx,
                       const LossConfig& cfg) {
  require_same_shape(perturbed, clean, "perceptual loss");
  ad::Tape t;
  return perceptual_loss(t.constant(perturbed), fx.extract(clean), fx, cfg).value().item();
}

LossGraph build_total_loss(const ad::Var& perturbed, const std::vector<Tensor>& clean_taps,
                           const Mask& mask, const TargetModels& models, const LossConfig& cfg) {
  if (models.classifier == nullptr) throw DomainError("loss needs a classifier");
  if (cfg.perceptual_on && models.features == nullptr) throw DomainError("loss needs a feature extractor");
  cfg.validate();
  ad::Tape& t = perturbed.tape();
  LossGraph g;
  ad::Var total = zero_scalar(t);
  if (cfg.perceptual_on) {
    total = perceptual_loss(perturbed, clean_taps, *models.features, cfg);
    g.breakdown.perceptual = total.value().item();
  }
  if (cfg.multiscale_on) {
    const ad::Var seg = multiscale_seg_loss(perturbed, mask, *models.classifier, cfg, &g.breakdown);
    total = ad::sub(total, seg);
  } else {
    // The term is disabled but the stop rule still needs the rates.
    const Tensor& x = perturbed.value();
    const ScaleRates r = misclassification_rates(x, mask, *models.classifier, cfg);
    g.breakdown.rates = r.rates;
    g.breakdown.degenerate = r.degenerate;
    g.breakdown.seg_terms.assign(cfg.scales.size(), 0.0);
  }
  g.breakdown.total = total.value().item();
  g.total = total;
  return g;
}

LossBreakdown total_loss(const Tensor& clean, const Tensor& perturbed, const Mask& mask,
                         const TargetModels& models, const LossConfig& cfg) {
  require_same_shape(clean, perturbed, "total loss");
  ad::Tape t;
  std::vector<Tensor> taps;
  if (cfg.perceptual_on) {
    if (models.features == nullptr) throw DomainError("loss needs a feature extractor");
    taps = models.features->extract(clean);
  }
  return build_total_loss(t.constant(perturbed), taps, mask, models, cfg).breakdown;
}

ScaleRates misclassification_rates(const Tensor& perturbed, const Mask& mask,
                                   const PixelClassifier& model, const LossConfig& cfg) {
  cfg.validate();
  const Shape& s = perturbed.shape();
  if (mask.height() != s.h || mask.width() != s.w) {
    throw ShapeError("mask does not match frame " + s.str());
  }
  ScaleRates out;
  for (double scale : cfg.scales) {
    const std::size_t oh = scaled_extent(s.h, scale), ow = scaled_extent(s.w, scale);
    const Mask m = resize_nearest_to(mask, oh, ow);
    if (m.empty()) {
      out.rates.push_back(1.0);
      out.degenerate.push_back(true);
      continue;
    }
    const Tensor resized = ad::resize_bilinear_forward(perturbed, oh, ow,
                                                       static_cast<double>(oh) / s.h,
                                                       static_cast<double>(ow) / s.w);
    out.rates.push_back(misclassification_rate(model.predict(resized), m, cfg.target_classes));
    out.degenerate.push_back(false);
  }
  return out;
}

}  // namespace vdf
