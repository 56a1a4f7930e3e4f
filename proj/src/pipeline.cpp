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

#include "vdf/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "vdf/error.hpp"
#include "vdf/metrics.hpp"

namespace vdf {

void FrameSequence::validate() const {
  if (frames.empty()) throw DomainError("frame sequence is empty");
  if (masks.size() != frames.size()) throw ShapeError("one mask per frame required");
  const Shape& s = frames.front().shape();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].shape() != s) throw ShapeError("frame " + std::to_string(i) + " shape differs");
    if (masks[i].height() != s.h || masks[i].width() != s.w) {
      throw ShapeError("mask " + std::to_string(i) + " does not match its frame");
    }
  }
}

void PipelineReport::aggregate() {
  mean_iterations = mean_psnr = mean_ssim = 0.0;
  if (frames.empty()) return;
  for (const FrameEntry& e : frames) {
    mean_iterations += static_cast<double>(e.attack.iterations_used);
    mean_psnr += e.psnr;
    mean_ssim += e.ssim;
  }
  const double n = static_cast<double>(frames.size());
  mean_iterations /= n;
  mean_psnr /= n;
  mean_ssim /= n;
}

Tensor quantize_8bit(const Tensor& x) {
  Tensor q(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = std::floor(std::clamp(x[i], 0.0, 1.0) * 255.0 + 0.5);
    q[i] = v / 255.0;
  }
  return q;
}

ComplexSpectrum random_spectrum(const Shape& shape, double sigma, std::uint64_t seed,
                                std::size_t frame_index) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be >= 0");
  ComplexSpectrum out(shape);
  if (sigma == 0.0) return out;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(frame_index),
                    static_cast<std::uint32_t>(static_cast<std::uint64_t>(frame_index) >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> n(0.0, sigma);
  for (double& v : out.re.values()) v = n(rng);
  for (double& v : out.im.values()) v = n(rng);
  return out;
}

PerturbationState fresh_state(const Shape& frame, const Mask& mask, const AttackConfig& cfg,
                              std::size_t frame_index) {
  PerturbationState s = zero_state(
      frame, init_attention(mask, cfg.attention_inside, cfg.attention_outside), frame_index);
  s.delta = random_spectrum(frame, cfg.sigma_random_for(frame), cfg.noise_seed, frame_index);
  return s;
}

PerturbationState init_next_state(const PerturbationState& prev, const Tensor& x_next,
                                  const Tensor& x_prev, const Mask& next_mask,
                                  const AttackConfig& cfg, std::size_t frame_index) {
  const Shape& s = x_next.shape();
  require_same_shape(x_next, x_prev, "warm start");
  if (prev.delta.shape() != s) throw ShapeError("previous state does not match frame " + s.str());
  if (!cfg.inherit) return fresh_state(s, next_mask, cfg, frame_index);
  const double sim = ssim(x_next, x_prev);
  PerturbationState next{random_spectrum(s, cfg.sigma_random_for(s), cfg.noise_seed, frame_index),
                         prev.logits, frame_index};
  for (std::size_t i = 0; i < next.delta.re.size(); ++i) {
    next.delta.re[i] += sim * prev.delta.re[i];
    next.delta.im[i] += sim * prev.delta.im[i];
  }
  return next;
}

ProtectedVideo protect_video(const FrameSequence& seq, const TargetModels& models,
                             const AttackConfig& cfg, const FrameCallback& on_frame) {
  seq.validate();
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  ProtectedVideo out;
  out.report.derived_masks = seq.derived_masks;
  const Shape& shape = seq.frames.front().shape();
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    try {
      const Tensor& x = seq.frames[i];
      FrameEntry entry;
      entry.index = i;
      PerturbationState init;
      if (i == 0) {
        init = fresh_state(shape, seq.masks[i], cfg, i);
      } else {
        init = init_next_state(out.states.back(), x, seq.frames[i - 1], seq.masks[i], cfg, i);
        entry.ssim_to_previous = ssim(x, seq.frames[i - 1]);
        entry.inherited = cfg.inherit;
      }
      AttackOutput r = attack_frame(x, seq.masks[i], init, models, cfg);
      Tensor written = quantize_8bit(r.perturbed);
      entry.attack = std::move(r.result);
      entry.psnr = psnr(written, x);
      entry.ssim = ssim(written, x);
      entry.max_deviation = max_abs_diff(written, x);
      out.frames.push_back(std::move(written));
      out.states.push_back(std::move(r.state));
      if (on_frame) on_frame(entry);
      out.report.frames.push_back(std::move(entry));
    } catch (const FrameError&) {
      throw;
    } catch (const std::exception& e) {
      throw FrameError(i, e.what());
    }
  }
  out.report.aggregate();
  out.report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace vdf
