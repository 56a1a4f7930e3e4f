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

#include "vdf/tensor.hpp"

namespace vdf::fft {

// All transforms are 2D over (H, W), independently per channel.
//
// Forward is unnormalized:
//   X[u,v] = sum_{h,w} x[h,w] exp(-2 pi i (u h / H + v w / W))
// Inverse carries the 1/(H W) factor.

ComplexSpectrum forward(const Tensor& x);
ComplexSpectrum forward(const ComplexSpectrum& x);

ComplexSpectrum inverse(const ComplexSpectrum& spectrum);

// Real part of the inverse transform. Imaginary residue (non-Hermitian
// spectra) is discarded.
Tensor inverse_real(const ComplexSpectrum& spectrum);

}  // namespace vdf::fft
