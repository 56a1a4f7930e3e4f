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

#include "vdf/attack.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "vdf/error.hpp"
#include "vdf/fft.hpp"

namespace vdf {
namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void sign_step(Tensor& target, const Tensor& grad, double eta) {
  require_same_shape(target, grad, "pgd step");
  for (std::size_t i = 0; i < target.size(); ++i) target[i] -= eta * sign(grad[i]);
}

double max_abs(const Tensor& t) {
  double m = 0.0;
  for (double v : t.values()) m = std::max(m, std::abs(v));
  return m;
}

void check_budget(const Tensor& x, const Tensor& xp, double radius, std::size_t iter) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(xp[i] - x[i]) > radius + 1e-12 || xp[i] < 0.0 || xp[i] > 1.0) {
      throw NumericError("budget violated at iteration " + std::to_string(iter));
    }
  }
}

[[noreturn]] void abort_non_finite(std::size_t frame, std::size_t iter, double max_delta,
                                   const LossBreakdown& b) {
  std::ostringstream os;
  os << "non-finite loss: frame " << frame << ", iteration " << iter << ", max|delta| " << max_delta
     << ", perceptual " << b.perceptual << ", seg terms [";
  for (std::size_t i = 0; i < b.seg_terms.size(); ++i) os << (i ? ", " : "") << b.seg_terms[i];
  os << "]";
  throw NumericError(os.str());
}

bool threshold_met(const std::vector<double>& rates, double threshold) {
  return std::all_of(rates.begin(), rates.end(), [&](double r) { return r >= threshold; });
}

// One forward (and optionally backward) evaluation of the objective.
struct Evaluation {
  Tensor perturbed;
  LossBreakdown breakdown;
  Tensor grad_a;       // delta.re or p
  Tensor grad_b;       // delta.im (frequency only)
  Tensor grad_logits;  // empty unless the gate is trainable
};

class Objective {
 public:
  Objective(const Tensor& x, const Mask& mask, const TargetModels& models, const AttackConfig& cfg)
      : x_(x), mask_(mask), models_(models), cfg_(cfg), box_(budget_box(x, cfg.radius)) {
    if (cfg.loss.perceptual_on) {
      if (models.features == nullptr) throw DomainError("perceptual loss needs a feature extractor");
      taps_ = models.features->extract(x);
    }
  }

  const BudgetBox& box() const { return box_; }

  Evaluation frequency(const PerturbationState& s, bool with_grad) const {
    ad::Tape t;
    const ad::CVar delta{t.variable(s.delta.re), t.variable(s.delta.im)};
    ad::Var logits = cfg_.spatial_mask ? t.variable(s.logits) : ad::Var{};
    const ad::Var xp =
        render_frequency(x_, box_, delta, cfg_.spatial_mask ? &logits : nullptr, cfg_.eq7_mode);
    return finish(t, xp, with_grad, delta.re, &delta.im, logits);
  }

  Evaluation spatial(const Tensor& p, const Tensor& logits_value, bool with_grad) const {
    ad::Tape t;
    const ad::Var pv = t.variable(p);
    ad::Var logits = cfg_.spatial_mask ? t.variable(logits_value) : ad::Var{};
    const ad::Var xp = render_spatial(x_, box_, pv, cfg_.spatial_mask ? &logits : nullptr,
                                      cfg_.spatial_mask);
    return finish(t, xp, with_grad, pv, nullptr, logits);
  }

 private:
  Evaluation finish(ad::Tape& t, const ad::Var& xp, bool with_grad, const ad::Var& a,
                    const ad::Var* b, const ad::Var& logits) const {
    LossGraph g = build_total_loss(xp, taps_, mask_, models_, cfg_.loss);
    Evaluation e{xp.value(), std::move(g.breakdown), {}, {}, {}};
    if (with_grad && std::isfinite(e.breakdown.total)) {
      const ad::Gradients grads = t.backward(g.total);
      e.grad_a = grads.of(a);
      if (b != nullptr) e.grad_b = grads.of(*b);
      if (logits.valid()) e.grad_logits = grads.of(logits);
    }
    return e;
  }

  const Tensor& x_;
  const Mask& mask_;
  TargetModels models_;
  const AttackConfig& cfg_;
  BudgetBox box_;
  std::vector<Tensor> taps_;
};

}  // namespace

std::string to_string(NoiseDomain d) { return d == NoiseDomain::kFrequency ? "frequency" : "spatial"; }

NoiseDomain parse_noise_domain(const std::string& s) {
  if (s == "frequency") return NoiseDomain::kFrequency;
  if (s == "spatial") return NoiseDomain::kSpatial;
  throw DomainError("noise_domain must be frequency or spatial, got '" + s + "'");
}

std::string to_string(StopReason r) {
  return r == StopReason::kThresholdMet ? "threshold_met" : "iteration_cap";
}

void AttackConfig::validate() const {
  if (!(radius > 0.0 && radius <= 1.0)) throw DomainError("radius must lie in (0, 1]");
  if (!(stop_threshold >= 0.0 && stop_threshold <= 1.0)) {
    throw DomainError("stop_threshold must lie in [0, 1]");
  }
  if (max_iters == 0) throw DomainError("max_iters must be at least 1");
  if (rate_check_every == 0) throw DomainError("rate_check_every must be at least 1");
  if (!(eta_delta >= 0.0) || !std::isfinite(eta_delta)) throw DomainError("eta_delta must be >= 0");
  if (!(eta_attention >= 0.0) || !std::isfinite(eta_attention)) {
    throw DomainError("eta_attention must be >= 0");
  }
  if (!(eta_spatial > 0.0) || !std::isfinite(eta_spatial)) throw DomainError("eta_spatial must be > 0");
  if (!std::isfinite(sigma_random)) throw DomainError("sigma_random must be finite");
  if (!(attention_outside > 0.0 && attention_outside <= attention_inside && attention_inside < 1.0)) {
    throw DomainError("attention init requires 0 < outside <= inside < 1");
  }
  loss.validate();
}

double default_eta_delta(const Shape& frame) {
  // A sign step moves all H*W coefficients at once; the induced per-pixel
  // change has rms eta / sqrt(H*W), so this targets an rms step of 1/255.
  return std::sqrt(static_cast<double>(frame.h * frame.w)) / 255.0;
}

double AttackConfig::eta_delta_for(const Shape& frame) const {
  return eta_delta > 0.0 ? eta_delta : default_eta_delta(frame);
}

double AttackConfig::sigma_random_for(const Shape& frame) const {
  if (sigma_random >= 0.0) return sigma_random;
  return 0.005 * std::sqrt(static_cast<double>(frame.h * frame.w) / 2.0);
}

PerturbationState pgd_step(const PerturbationState& state, const StateGradients& grads,
                           const AttackConfig& cfg) {
  PerturbationState next = state;
  const double eta = cfg.eta_delta_for(state.frame_shape());
  sign_step(next.delta.re, grads.delta.re, eta);
  sign_step(next.delta.im, grads.delta.im, eta);
  if (cfg.spatial_mask) sign_step(next.logits, grads.logits, cfg.eta_attention);
  return next;
}

AttackOutput attack_frame(const Tensor& x, const Mask& mask, const PerturbationState& init,
                          const TargetModels& models, const AttackConfig& cfg) {
  cfg.validate();
  if (init.delta.shape() != x.shape() || init.logits.shape() != Shape{x.height(), x.width(), 1}) {
    throw ShapeError("initial state does not match frame " + x.shape().str());
  }
  if (mask.height() != x.height() || mask.width() != x.width()) {
    throw ShapeError("mask does not match frame " + x.shape().str());
  }
  if (models.classifier == nullptr) throw DomainError("attack needs a classifier");
  const auto start = std::chrono::steady_clock::now();
  const Objective objective(x, mask, models, cfg);
  const bool spatial = cfg.noise_domain == NoiseDomain::kSpatial;

  PerturbationState state = init;
  // Spatial iterate; projected into the box when there is no gate.
  Tensor p;
  if (spatial) {
    p = fft::inverse_real(state.delta);
    if (!cfg.spatial_mask) {
      for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::clamp(x[i] + p[i], objective.box().lo[i], objective.box().hi[i]) - x[i];
      }
    }
  }

  AttackOutput out;
  for (std::size_t iter = 0;; ++iter) {
    const bool check = iter % cfg.rate_check_every == 0 || iter == cfg.max_iters;
    const bool step = iter < cfg.max_iters;
    Evaluation e = spatial ? objective.spatial(p, state.logits, step) : objective.frequency(state, step);
    if (!std::isfinite(e.breakdown.total)) {
      const double md = spatial ? max_abs(p) : std::max(max_abs(state.delta.re), max_abs(state.delta.im));
      abort_non_finite(state.frame_index, iter, md, e.breakdown);
    }
    if (check) {
      check_budget(x, e.perturbed, cfg.radius, iter);
      const bool met = threshold_met(e.breakdown.rates, cfg.stop_threshold);
      if (cfg.verbose) {
        const double min_rate = *std::min_element(e.breakdown.rates.begin(), e.breakdown.rates.end());
        std::fprintf(stderr, "frame %zu iter %zu loss %.6f min_rate %.4f\n", state.frame_index, iter,
                     e.breakdown.total, min_rate);
      }
      if (met || !step) {
        out.result.stop_reason = met ? StopReason::kThresholdMet : StopReason::kIterationCap;
        out.result.iterations_used = iter;
        out.result.rates = e.breakdown.rates;
        out.result.loss = std::move(e.breakdown);
        out.perturbed = std::move(e.perturbed);
        break;
      }
    }
    if (spatial) {
      sign_step(p, e.grad_a, cfg.eta_spatial);
      if (!cfg.spatial_mask) {
        for (std::size_t i = 0; i < p.size(); ++i) {
          p[i] = std::clamp(x[i] + p[i], objective.box().lo[i], objective.box().hi[i]) - x[i];
        }
      } else {
        sign_step(state.logits, e.grad_logits, cfg.eta_attention);
      }
    } else {
      state = pgd_step(state, StateGradients{ComplexSpectrum{e.grad_a, e.grad_b}, e.grad_logits}, cfg);
    }
  }
  if (spatial) state.delta = fft::forward(p);
  out.state = std::move(state);
  out.result.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace vdf
