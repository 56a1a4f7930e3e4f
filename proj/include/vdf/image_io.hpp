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

// 8-bit PNG frames and masks, and the frame-directory convention
// frame_%06d.png / mask_%06d.png.

#include <filesystem>
#include <string>
#include <vector>

#include "vdf/models.hpp"
#include "vdf/pipeline.hpp"
#include "vdf/tensor.hpp"

namespace vdf {

/// RGB PNG -> H x W x 3 in [0, 1] (value / 255). Grey or alpha inputs are
/// converted by libpng.
Tensor read_png_rgb(const std::filesystem::path& path);
/// Quantises round-half-up.
void write_png_rgb(const std::filesystem::path& path, const Tensor& image);

/// Greyscale PNG -> mask (>= 128 set).
Mask read_png_mask(const std::filesystem::path& path);
/// Set pixels as 255, clear as 0.
void write_png_mask(const std::filesystem::path& path, const Mask& mask);

std::string frame_name(std::size_t index);
std::string mask_name(std::size_t index);
std::string state_name(std::size_t index);

/// Frames sorted by name; indices must run 0..N-1 without gaps. A missing
/// mask is derived from the classifier's argmax on the clean frame, in
/// which case derived_masks is set; with no classifier it is an IoError.
FrameSequence load_frame_directory(const std::filesystem::path& dir,
                                   const PixelClassifier* classifier = nullptr);

/// Face-class argmax of the classifier on x.
Mask derive_mask(const PixelClassifier& classifier, const Tensor& x);

}  // namespace vdf
