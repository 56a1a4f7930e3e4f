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

// The frame loop: similarity-guided warm starts and per-frame attacks.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "vdf/attack.hpp"

namespace vdf {

struct FrameSequence {
  std::vector<Tensor> frames;
  std::vector<Mask> masks;
  double fps = 25.0;
  std::vector<std::filesystem::path> sources;
  bool derived_masks = false;

  /// Non-empty, one mask per frame, shared shape.
  void validate() const;
};

struct FrameEntry {
  std::size_t index = 0;
  AttackResult attack;
  std::optional<double> ssim_to_previous;  // clean frames; absent for frame 0
  double psnr = 0.0;                       // written (8-bit) frame vs clean
  double ssim = 0.0;                       // written frame vs clean
  double max_deviation = 0.0;              // written frame vs clean, L-inf
  bool inherited = false;
};

struct PipelineReport {
  std::vector<FrameEntry> frames;
  double mean_iterations = 0.0;
  double mean_psnr = 0.0;
  double mean_ssim = 0.0;
  double wall_time = 0.0;
  bool derived_masks = false;

  /// Recomputes the aggregates from the entries.
  void aggregate();
};

struct ProtectedVideo {
  std::vector<Tensor> frames;  // 8-bit quantised, as written
  std::vector<PerturbationState> states;
  PipelineReport report;
};

/// Round-half-up to multiples of 1/255.
Tensor quantize_8bit(const Tensor& x);

/// i.i.d. Gaussian real and imaginary parts with std sigma, seeded by
/// (seed, frame_index).
ComplexSpectrum random_spectrum(const Shape& shape, double sigma, std::uint64_t seed,
                                std::size_t frame_index);

/// delta_random plus init_attention(mask); used for the first frame and for
/// every frame when inheritance is off.
PerturbationState fresh_state(const Shape& frame, const Mask& mask, const AttackConfig& cfg,
                              std::size_t frame_index);

/// ssim(x_next, x_prev) * delta_prev + delta_random, attention logits copied.
/// With cfg.inherit off this is fresh_state(...).
PerturbationState init_next_state(const PerturbationState& prev, const Tensor& x_next,
                                  const Tensor& x_prev, const Mask& next_mask,
                                  const AttackConfig& cfg, std::size_t frame_index);

using FrameCallback = std::function<void(const FrameEntry&)>;

/// Sequential frame loop. Per-frame failures surface as FrameError.
ProtectedVideo protect_video(const FrameSequence& seq, const TargetModels& models,
                             const AttackConfig& cfg, const FrameCallback& on_frame = {});

}  // namespace vdf
