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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vdf/autodiff.hpp"
#include "vdf/tensor.hpp"

namespace vdf {

/// How the frequency perturbation is combined with the frame.
///
/// kCanonical: x' = clamp(x + A * ifft_real(delta), max(x - r, 0), min(x + r, 1))
/// kLiteral:   x' = clamp(ifft_real(fft(x) + delta) * A + x, same bounds)
///
/// The literal form adds A * x on top of x, so for bright masked pixels it
/// saturates the budget immediately; it is kept for ablation runs only.
enum class Eq7Mode { kCanonical, kLiteral };

std::string to_string(Eq7Mode m);
Eq7Mode parse_eq7_mode(const std::string& s);

/// Trainable per-frame state: the spectral perturbation and the attention
/// logits (H x W x 1; realized attention is sigmoid(logits)).
struct PerturbationState {
  ComplexSpectrum delta;
  Tensor logits;
  std::size_t frame_index = 0;

  Shape frame_shape() const { return delta.shape(); }
};

/// logit(inside) on mask pixels, logit(outside) elsewhere.
/// Requires 0 < outside <= inside < 1.
Tensor init_attention(const Mask& face_mask, double inside, double outside);

/// Zero spectrum plus the given attention logits.
PerturbationState zero_state(const Shape& frame, Tensor logits, std::size_t frame_index = 0);

/// Per-pixel L-inf box intersected with [0, 1].
struct BudgetBox {
  Tensor lo;
  Tensor hi;
};
BudgetBox budget_box(const Tensor& x, double radius);

/// Differentiable renderers. `logits == nullptr` disables the attention gate
/// (A = 1 everywhere).
ad::Var render_frequency(const Tensor& x, const BudgetBox& box, const ad::CVar& delta,
                         const ad::Var* logits, Eq7Mode mode);
/// Pixel-space variant used by the spatial-domain ablation. Without a gate
/// and with `clamp_output == false` the caller guarantees x + p is already
/// inside the box (the iterate is projected), so no clamp node is recorded.
ad::Var render_spatial(const Tensor& x, const BudgetBox& box, const ad::Var& p,
                       const ad::Var* logits, bool clamp_output);

/// Forward-only x'. Validates radius, shapes and finiteness of delta.
Tensor apply(const Tensor& x, const PerturbationState& state, double radius,
             Eq7Mode mode = Eq7Mode::kCanonical, bool gate = true);

/// apply(...) - x; satisfies max |p| <= radius.
Tensor effective_perturbation(const Tensor& x, const PerturbationState& state, double radius,
                              Eq7Mode mode = Eq7Mode::kCanonical, bool gate = true);

// ---- VDFS sidecar ----
// Little-endian: "VDFS", u16 version, u32 H, u32 W, u32 C, then delta real
// plane, delta imaginary plane, attention logits (H*W), all f64 row-major.
inline constexpr std::uint16_t kStateFormatVersion = 1;

std::vector<std::uint8_t> encode_state(const PerturbationState& state);
PerturbationState decode_state(const std::vector<std::uint8_t>& bytes, std::size_t frame_index);
void write_state(const std::filesystem::path& path, const PerturbationState& state);
PerturbationState read_state(const std::filesystem::path& path, std::size_t frame_index);

}  // namespace vdf
