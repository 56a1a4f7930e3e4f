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

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "vdf/dataset.hpp"
#include "vdf/error.hpp"
#include "vdf/image_io.hpp"

using namespace vdf;
using vdf::testing::random_tensor;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("vdf_io_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("png frames round trip at 8 bits") {
  TempDir t;
  const Tensor x = random_tensor(Shape{13, 21, 3}, 1);
  write_png_rgb(t.path / "a.png", x);
  const Tensor back = read_png_rgb(t.path / "a.png");
  CHECK(back == quantize_8bit(x));
  write_png_rgb(t.path / "b.png", back);
  CHECK(read_png_rgb(t.path / "b.png") == back);
  CHECK_THROWS_AS(read_png_rgb(t.path / "missing.png"), IoError);
  std::ofstream(t.path / "junk.png") << "not a png";
  CHECK_THROWS_AS(read_png_rgb(t.path / "junk.png"), IoError);
}

TEST_CASE("png masks round trip") {
  TempDir t;
  Mask m(9, 11);
  for (std::size_t i = 0; i < 99; i += 3) m.set(i / 11, i % 11, true);
  write_png_mask(t.path / "m.png", m);
  const Mask back = read_png_mask(t.path / "m.png");
  CHECK(back.bits().size() == m.bits().size());
  for (std::size_t y = 0; y < 9; ++y) {
    for (std::size_t x = 0; x < 11; ++x) CHECK(back(y, x) == m(y, x));
  }
}

TEST_CASE("frame directories") {
  TempDir t;
  CHECK(frame_name(7) == "frame_000007.png");
  CHECK(mask_name(12) == "mask_000012.png");
  CHECK(state_name(3) == "state_000003.vdfs");
  Mask m(16, 16);
  m.set(4, 4, true);
  for (std::size_t i = 0; i < 3; ++i) {
    write_png_rgb(t.path / frame_name(i), random_tensor(Shape{16, 16, 3}, i));
    write_png_mask(t.path / mask_name(i), m);
  }
  std::ofstream(t.path / "notes.txt") << "ignored";
  const FrameSequence seq = load_frame_directory(t.path);
  CHECK(seq.frames.size() == 3);
  CHECK_FALSE(seq.derived_masks);
  CHECK(seq.masks[2](4, 4));
  CHECK(seq.frames[1] == quantize_8bit(random_tensor(Shape{16, 16, 3}, 1)));

  // A missing mask needs a classifier.
  fs::remove(t.path / mask_name(1));
  CHECK_THROWS_AS(load_frame_directory(t.path), IoError);
  const ConstantClassifier face({0.1, 0.9});
  const FrameSequence derived = load_frame_directory(t.path, &face);
  CHECK(derived.derived_masks);
  for (std::size_t y = 0; y < 16; ++y) CHECK(derived.masks[1](y, 3));

  // Gaps are rejected.
  write_png_rgb(t.path / frame_name(4), random_tensor(Shape{16, 16, 3}, 4));
  CHECK_THROWS_AS(load_frame_directory(t.path, &face), IoError);

  TempDir empty;
  CHECK_THROWS_AS(load_frame_directory(empty.path), IoError);
  CHECK_THROWS_AS(load_frame_directory(empty.path / "nope"), IoError);
}

TEST_CASE("dataset seeds and manifests") {
  std::set<std::uint64_t> seen;
  for (std::size_t i = 0; i < 200; ++i) seen.insert(scene_seed(2024, i));
  for (std::size_t i = 0; i < 50; ++i) seen.insert(heldout_seed(2024, i));
  CHECK(seen.size() == 250);
  CHECK(scene_seed(2024, 3) == scene_seed(2024, 3));
  CHECK(scene_seed(2024, 3) != scene_seed(2025, 3));

  TempDir t;
  DatasetManifest man;
  man.count = 3;
  man.size = 32;
  for (std::size_t i = 0; i < 3; ++i) man.scene_seeds.push_back(scene_seed(man.seed, i));
  const std::vector<SyntheticScene> scenes = render_dataset(man);
  CHECK(scenes.size() == 3);
  CHECK(scenes[0].image.shape() == Shape{32, 32, 3});
  const fs::path dir = t.path / "ds";
  {
    StagedDirectory staged(dir);
    write_dataset(staged.path(), scenes, man);
    CHECK_FALSE(fs::exists(dir));
    staged.commit();
  }
  CHECK(fs::exists(dir / "manifest.json"));
  const DatasetManifest back = read_manifest(dir);
  CHECK(back.scene_seeds == man.scene_seeds);
  CHECK(back.size == 32);
  CHECK(back.count == 3);
  const FrameSequence seq = load_frame_directory(dir);
  CHECK(seq.frames[2] == quantize_8bit(scenes[2].image));

  CHECK_THROWS_AS(StagedDirectory{dir}, IoError);
  {
    StagedDirectory abandoned(t.path / "gone");
    std::ofstream(abandoned.path() / "x") << 1;
  }
  CHECK_FALSE(fs::exists(t.path / "gone"));
  CHECK_FALSE(fs::exists(t.path / "gone.partial"));
}
