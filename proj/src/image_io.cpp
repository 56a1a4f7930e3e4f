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

#include "vdf/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <regex>

#include "vdf/error.hpp"

namespace vdf {
namespace {

std::vector<std::uint8_t> read_png(const std::filesystem::path& path, png_uint_32 format,
                                   std::size_t& h, std::size_t& w) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw IoError(path.string() + ": " + image.message);
  }
  image.format = format;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw IoError(path.string() + ": " + msg);
  }
  h = image.height;
  w = image.width;
  return buffer;
}

void write_png(const std::filesystem::path& path, png_uint_32 format, std::size_t h, std::size_t w,
               const std::vector<std::uint8_t>& pixels) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = format;
  if (!png_image_write_to_file(&image, path.c_str(), 0, pixels.data(), 0, nullptr)) {
    throw IoError(path.string() + ": " + image.message);
  }
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::floor(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5));
}

std::string indexed(const char* prefix, std::size_t index, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%06zu.%s", prefix, index, ext);
  return buf;
}

}  // namespace

Tensor read_png_rgb(const std::filesystem::path& path) {
  std::size_t h = 0, w = 0;
  const std::vector<std::uint8_t> px = read_png(path, PNG_FORMAT_RGB, h, w);
  Tensor t(Shape{h, w, 3});
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = px[i] / 255.0;
  return t;
}

void write_png_rgb(const std::filesystem::path& path, const Tensor& image) {
  if (image.channels() != 3) throw ShapeError("PNG frames must have 3 channels");
  std::vector<std::uint8_t> px(image.size());
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = to_byte(image[i]);
  write_png(path, PNG_FORMAT_RGB, image.height(), image.width(), px);
}

Mask read_png_mask(const std::filesystem::path& path) {
  std::size_t h = 0, w = 0;
  const std::vector<std::uint8_t> px = read_png(path, PNG_FORMAT_GRAY, h, w);
  Mask m(h, w);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) m.set(y, x, px[y * w + x] >= 128);
  }
  return m;
}

void write_png_mask(const std::filesystem::path& path, const Mask& mask) {
  std::vector<std::uint8_t> px(mask.bits().size());
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = mask.bits()[i] ? 255 : 0;
  write_png(path, PNG_FORMAT_GRAY, mask.height(), mask.width(), px);
}

std::string frame_name(std::size_t index) { return indexed("frame", index, "png"); }
std::string mask_name(std::size_t index) { return indexed("mask", index, "png"); }
std::string state_name(std::size_t index) { return indexed("state", index, "vdfs"); }

Mask derive_mask(const PixelClassifier& classifier, const Tensor& x) {
  const std::vector<std::uint8_t> cls = argmax_classes(classifier.predict(x));
  Mask m(x.height(), x.width());
  for (std::size_t y = 0; y < m.height(); ++y) {
    for (std::size_t xx = 0; xx < m.width(); ++xx) m.set(y, xx, cls[y * m.width() + xx] == kFaceClass);
  }
  return m;
}

FrameSequence load_frame_directory(const std::filesystem::path& dir, const PixelClassifier* classifier) {
  if (!std::filesystem::is_directory(dir)) throw IoError(dir.string() + ": not a directory");
  static const std::regex pattern(R"(frame_(\d{6})\.png)");
  std::vector<std::pair<std::size_t, std::filesystem::path>> found;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (std::regex_match(name, m, pattern)) found.emplace_back(std::stoul(m[1].str()), entry.path());
  }
  if (found.empty()) throw IoError(dir.string() + ": no frame_%06d.png files");
  std::sort(found.begin(), found.end());
  FrameSequence seq;
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (found[i].first != i) throw IoError(dir.string() + ": missing " + frame_name(i));
    Tensor frame = read_png_rgb(found[i].second);
    const std::filesystem::path mask_path = dir / mask_name(i);
    if (std::filesystem::exists(mask_path)) {
      seq.masks.push_back(read_png_mask(mask_path));
    } else {
      if (classifier == nullptr) throw IoError(mask_path.string() + ": missing and no model to derive it");
      seq.masks.push_back(derive_mask(*classifier, frame));
      seq.derived_masks = true;
    }
    seq.frames.push_back(std::move(frame));
    seq.sources.push_back(found[i].second);
  }
  seq.validate();
  return seq;
}

}  // namespace vdf
