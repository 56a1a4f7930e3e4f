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

// Sign-gradient PGD over the frequency perturbation and attention logits.

#include <cstdint>
#include <string>
#include <vector>

#include "vdf/losses.hpp"
#include "vdf/perturbation.hpp"

namespace vdf {

enum class NoiseDomain { kFrequency, kSpatial };
std::string to_string(NoiseDomain d);
NoiseDomain parse_noise_domain(const std::string& s);

enum class StopReason { kThresholdMet, kIterationCap };
std::string to_string(StopReason r);

struct AttackConfig {
  double radius = 0.05;
  /// Spectral sign-step; 0 selects the default for the frame shape
  /// (see default_eta_delta).
  double eta_delta = 0.0;
  double eta_attention = 0.01;
  /// Pixel sign-step of the spatial-domain ablation.
  double eta_spatial = 1.0 / 255.0;
  std::size_t max_iters = 500;
  double stop_threshold = 0.80;
  std::size_t rate_check_every = 10;
  LossConfig loss;

  NoiseDomain noise_domain = NoiseDomain::kFrequency;
  bool spatial_mask = true;
  bool inherit = true;
  Eq7Mode eq7_mode = Eq7Mode::kCanonical;

  double attention_inside = 0.9;
  double attention_outside = 0.1;
  /// Std of real and imaginary parts of the random spectral component; 0
  /// disables it, negative selects 0.005 * sqrt(H * W / 2).
  double sigma_random = -1.0;

  std::uint64_t data_seed = 2024;
  std::uint64_t weight_seed = 7;
  std::uint64_t noise_seed = 1234;

  bool verbose = false;

  void validate() const;
  double eta_delta_for(const Shape& frame) const;
  double sigma_random_for(const Shape& frame) const;
};

/// sqrt(H * W) / 255.
double default_eta_delta(const Shape& frame);

struct AttackResult {
  std::size_t iterations_used = 0;
  std::vector<double> rates;
  LossBreakdown loss;
  StopReason stop_reason = StopReason::kIterationCap;
  double wall_time = 0.0;  // seconds
};

struct AttackOutput {
  PerturbationState state;
  Tensor perturbed;
  AttackResult result;
};

struct StateGradients {
  ComplexSpectrum delta;
  Tensor logits;  // empty (default-constructed) when attention is frozen
};

/// delta -= eta_delta * sign(g_delta) on real and imaginary parts
/// independently; logits -= eta_attention * sign(g_logits) when the spatial
/// mask is on. sign(0) = 0.
PerturbationState pgd_step(const PerturbationState& state, const StateGradients& grads,
                           const AttackConfig& cfg);

/// Runs the attack from `init`. Rates are checked before the first step and
/// every `rate_check_every` steps thereafter, and once more at the cap.
/// iterations_used counts sign steps taken.
AttackOutput attack_frame(const Tensor& x, const Mask& mask, const PerturbationState& init,
                          const TargetModels& models, const AttackConfig& cfg);

}  // namespace vdf
