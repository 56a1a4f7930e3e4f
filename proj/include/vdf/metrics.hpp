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

// Image quality and spectral diagnostics.

#include <array>

#include "vdf/tensor.hpp"

namespace vdf {

inline constexpr std::size_t kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;

/// Mean SSIM over all valid 11x11 Gaussian windows (sigma 1.5), per channel,
/// averaged across channels. C1 = 0.01^2, C2 = 0.03^2 for unit range.
/// Throws ShapeError on mismatched shapes or frames smaller than the window.
double ssim(const Tensor& x, const Tensor& y);

/// The normalised 11x11 Gaussian window, row-major.
std::array<double, kSsimWindow * kSsimWindow> ssim_window();

/// 10 log10(1 / MSE) at peak 1; +infinity when the inputs coincide.
double psnr(const Tensor& x, const Tensor& y);

/// Fractions of spectral energy (summed over channels) in the radial bands
/// r <= R/3, R/3 < r <= 2R/3, r > 2R/3 of the centred spectrum, R = min(H, W)/2.
/// An all-zero image reports (1, 0, 0).
struct BandEnergy {
  double low = 0.0;
  double mid = 0.0;
  double high = 0.0;
};
BandEnergy band_energy(const Tensor& x);

}  // namespace vdf
