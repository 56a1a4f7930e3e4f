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

// Purification harness: JPEG and resize round trips and the rate retention
// they leave behind.

#include <optional>
#include <string>
#include <vector>

#include "vdf/losses.hpp"

namespace vdf {

struct PurificationSpec {
  enum class Kind { kJpeg, kResize };
  Kind kind = Kind::kJpeg;
  int quality = 75;    // jpeg
  double scale = 1.0;  // resize

  void validate() const;
  /// "jpeg:75" or "resize:0.6".
  std::string label() const;
  static PurificationSpec parse(const std::string& text);
};

/// Baseline JPEG, 4:2:0, Annex K tables at the IJG quality mapping, decoded
/// back to 8-bit RGB.
Tensor jpeg_roundtrip(const Tensor& x, int quality);
/// Encoded bytes of the same codec settings (determinism checks).
std::vector<std::uint8_t> jpeg_encode(const Tensor& x, int quality);

/// Bilinear to round(H s) x round(W s) and back to H x W.
Tensor resize_roundtrip(const Tensor& x, double scale);

Tensor purify(const Tensor& x, const PurificationSpec& spec);

struct PurifiedFrame {
  std::vector<double> rates;                    // per scale, after purification
  std::vector<std::optional<double>> retention;  // post / pre; absent when pre is 0
  double psnr = 0.0;                            // purified vs clean
};

struct PurificationSection {
  PurificationSpec spec;
  std::vector<PurifiedFrame> frames;
};

struct RobustnessReport {
  std::vector<double> scales;
  std::vector<std::vector<double>> pre_rates;  // [frame][scale]
  std::vector<PurificationSection> sections;

  /// Mean over frames of the post-purification rate at the given scale of
  /// section s; throws if the scale is not evaluated.
  double mean_post_rate(std::size_t section, double scale) const;
};

RobustnessReport evaluate_robustness(const std::vector<Tensor>& protected_frames,
                                     const std::vector<Tensor>& clean_frames,
                                     const std::vector<Mask>& masks, const PixelClassifier& model,
                                     const std::vector<PurificationSpec>& specs,
                                     const LossConfig& cfg);

/// frame,spec,scale_idx,rate_pre,rate_post,retention,psnr
std::string robustness_csv(const RobustnessReport& report);

}  // namespace vdf
