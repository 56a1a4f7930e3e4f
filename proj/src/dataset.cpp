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

#include "vdf/dataset.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "vdf/error.hpp"
#include "vdf/image_io.hpp"

namespace vdf {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kHeldoutStream = 0x48454C444F555421ull;

SceneStyle style_of(std::size_t size) {
  SceneStyle s;
  s.height = s.width = size;
  return s;
}

}  // namespace

std::uint64_t scene_seed(std::uint64_t dataset_seed, std::size_t index) {
  return splitmix64(splitmix64(dataset_seed) + index);
}

std::uint64_t heldout_seed(std::uint64_t dataset_seed, std::size_t index) {
  return splitmix64(splitmix64(dataset_seed ^ kHeldoutStream) + index);
}

std::vector<SyntheticScene> training_scenes(std::uint64_t seed, std::size_t count, std::size_t size) {
  std::vector<SyntheticScene> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(generate_scene(scene_seed(seed, i), style_of(size)));
  return out;
}

std::vector<SyntheticScene> heldout_scenes(std::uint64_t seed, std::size_t count, std::size_t size) {
  std::vector<SyntheticScene> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(generate_scene(heldout_seed(seed, i), style_of(size)));
  return out;
}

std::vector<SyntheticScene> render_dataset(const DatasetManifest& m) {
  if (m.sequence) return generate_sequence(m.seed, m.count, style_of(m.size), m.shift_px);
  return training_scenes(m.seed, m.count, m.size);
}

void write_dataset(const std::filesystem::path& dir, const std::vector<SyntheticScene>& scenes,
                   const DatasetManifest& manifest) {
  nlohmann::ordered_json doc;
  doc["generator"] = "vdf-synthetic";
  doc["seed"] = manifest.seed;
  doc["count"] = scenes.size();
  doc["size"] = manifest.size;
  doc["mode"] = manifest.sequence ? "sequence" : "scenes";
  if (manifest.sequence) doc["shift_px"] = manifest.shift_px;
  nlohmann::ordered_json seeds = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    write_png_rgb(dir / frame_name(i), scenes[i].image);
    write_png_mask(dir / mask_name(i), scenes[i].mask);
    seeds.push_back(scenes[i].seed);
  }
  doc["scene_seeds"] = seeds;
  std::ofstream out(dir / "manifest.json");
  out << doc.dump(2) << "\n";
  if (!out) throw IoError((dir / "manifest.json").string() + ": write failed");
}

DatasetManifest read_manifest(const std::filesystem::path& dir) {
  const std::filesystem::path path = dir / "manifest.json";
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open");
  const auto doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw IoError(path.string() + ": not a JSON object");
  try {
    DatasetManifest m;
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.count = doc.at("count").get<std::size_t>();
    m.size = doc.at("size").get<std::size_t>();
    m.sequence = doc.at("mode").get<std::string>() == "sequence";
    if (m.sequence) m.shift_px = doc.at("shift_px").get<double>();
    m.scene_seeds = doc.at("scene_seeds").get<std::vector<std::uint64_t>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

StagedDirectory::StagedDirectory(std::filesystem::path destination)
    : destination_(std::move(destination)) {
  namespace fs = std::filesystem;
  if (fs::exists(destination_) && !(fs::is_directory(destination_) && fs::is_empty(destination_))) {
    throw IoError(destination_.string() + ": exists and is not an empty directory");
  }
  staging_ = destination_;
  staging_ += ".partial";
  std::error_code ec;
  fs::remove_all(staging_, ec);
  if (!fs::create_directories(staging_, ec) || ec) {
    throw IoError(staging_.string() + ": cannot create (" + ec.message() + ")");
  }
}

StagedDirectory::~StagedDirectory() {
  if (!committed_) {
    std::error_code ec;
    std::filesystem::remove_all(staging_, ec);
  }
}

void StagedDirectory::commit() {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::exists(destination_)) fs::remove(destination_, ec);
  fs::rename(staging_, destination_, ec);
  if (ec) throw IoError(destination_.string() + ": cannot publish (" + ec.message() + ")");
  committed_ = true;
}

}  // namespace vdf
