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

// Synthetic dataset directories and the all-or-nothing output contract.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vdf/models.hpp"

namespace vdf {

inline constexpr std::uint64_t kCanonicalDataSeed = 2024;
inline constexpr std::size_t kCanonicalTrainCount = 200;
inline constexpr std::size_t kCanonicalHeldoutCount = 50;
inline constexpr std::size_t kCanonicalSequenceLength = 16;
inline constexpr std::size_t kCanonicalSize = 64;

/// Seed of the i-th independent scene of a dataset (splitmix64 of seed, i).
std::uint64_t scene_seed(std::uint64_t dataset_seed, std::size_t index);
/// Held-out scenes come from a disjoint seed stream of the same dataset seed.
std::uint64_t heldout_seed(std::uint64_t dataset_seed, std::size_t index);

std::vector<SyntheticScene> training_scenes(std::uint64_t seed, std::size_t count, std::size_t size);
std::vector<SyntheticScene> heldout_scenes(std::uint64_t seed, std::size_t count, std::size_t size);

struct DatasetManifest {
  std::uint64_t seed = kCanonicalDataSeed;
  std::size_t count = 0;
  std::size_t size = kCanonicalSize;
  bool sequence = false;
  double shift_px = 1.0;
  std::vector<std::uint64_t> scene_seeds;
};

/// Renders the dataset the manifest describes.
std::vector<SyntheticScene> render_dataset(const DatasetManifest& manifest);

/// frame/mask PNGs plus manifest.json into `dir`.
void write_dataset(const std::filesystem::path& dir, const std::vector<SyntheticScene>& scenes,
                   const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::filesystem::path& dir);

/// Writes into a sibling staging directory and renames it into place on
/// commit; the destination must be absent or empty. Uncommitted staging is
/// removed on destruction.
class StagedDirectory {
 public:
  explicit StagedDirectory(std::filesystem::path destination);
  ~StagedDirectory();
  StagedDirectory(const StagedDirectory&) = delete;
  StagedDirectory& operator=(const StagedDirectory&) = delete;

  const std::filesystem::path& path() const { return staging_; }
  void commit();

 private:
  std::filesystem::path destination_;
  std::filesystem::path staging_;
  bool committed_ = false;
};

}  // namespace vdf
