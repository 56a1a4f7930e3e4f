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

#include <algorithm>
#include <cmath>
#include <random>

#include "vdf/error.hpp"
#include "vdf/models.hpp"

namespace vdf {
namespace {

struct Layout {
  double cy, cx, ry, rx;
};

// 3x3 mean filter with clamped borders.
std::vector<double> box_blur(const std::vector<double>& in, std::size_t h, std::size_t w) {
  std::vector<double> out(in.size());
  const auto clampi = [](long v, std::size_t n) {
    return static_cast<std::size_t>(std::clamp<long>(v, 0, static_cast<long>(n) - 1));
  };
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (long dy = -1; dy <= 1; ++dy) {
        for (long dx = -1; dx <= 1; ++dx) {
          acc += in[clampi(static_cast<long>(y) + dy, h) * w + clampi(static_cast<long>(x) + dx, w)];
        }
      }
      out[y * w + x] = acc / 9.0;
    }
  }
  return out;
}

struct SceneFields {
  Tensor background;  // already biased, unclamped
  Tensor texture;     // zero-mean face texture, indexed in face coordinates
  Layout layout;
};

SceneFields draw_fields(std::uint64_t seed, const SceneStyle& style) {
  if (style.height < 8 || style.width < 8) throw DomainError("scene must be at least 8x8");
  const std::size_t h = style.height, w = style.width;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SceneFields f{Tensor(Shape{h, w, 3}), Tensor(Shape{h, w, 3}), {}};
  for (std::size_t c = 0; c < 3; ++c) {
    std::vector<double> noise(h * w);
    for (double& v : noise) v = unit(rng);
    noise = box_blur(box_blur(noise, h, w), h, w);
    const double bias = c == 2 ? style.background_blue_bias : 0.0;
    for (std::size_t p = 0; p < h * w; ++p) {
      f.background[p * 3 + c] = style.background_level + style.background_spread * (noise[p] - 0.5) + bias;
    }
  }

  const double hd = static_cast<double>(h), wd = static_cast<double>(w);
  f.layout.cy = hd / 3.0 + unit(rng) * hd / 3.0;
  f.layout.cx = wd / 3.0 + unit(rng) * wd / 3.0;
  f.layout.ry = hd / 6.0 + unit(rng) * hd / 6.0;
  f.layout.rx = wd / 6.0 + unit(rng) * wd / 6.0;

  std::normal_distribution<double> grain(0.0, style.texture_std);
  for (double& v : f.texture.values()) v = grain(rng);
  return f;
}

SyntheticScene render(const SceneFields& f, const SceneStyle& style, double shift,
                      std::uint64_t seed) {
  const std::size_t h = style.height, w = style.width;
  const Layout& l = f.layout;
  const double cx = l.cx + shift;
  const long texture_shift = std::lround(shift);
  const double eye_r = std::max(1.0, std::min(l.rx, l.ry) / 6.0);
  const double eye_y = l.cy - l.ry / 4.0;
  const double mouth_y = l.cy + l.ry / 2.0;
  const double mouth_half_h = std::max(0.75, l.ry / 10.0);

  SyntheticScene s{Tensor(Shape{h, w, 3}), Mask(h, w), seed};
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double py = static_cast<double>(y) + 0.5, px = static_cast<double>(x) + 0.5;
      const double ny = (py - l.cy) / l.ry, nx = (px - cx) / l.rx;
      const bool inside = nx * nx + ny * ny <= 1.0;
      double rgb[3];
      if (inside) {
        s.mask.set(y, x, true);
        const long tx = ((static_cast<long>(x) - texture_shift) % static_cast<long>(w) +
                         static_cast<long>(w)) % static_cast<long>(w);
        const double* tex = f.texture.raw() + (y * w + static_cast<std::size_t>(tx)) * 3;
        for (std::size_t c = 0; c < 3; ++c) {
          rgb[c] = style.face_level + (c == 0 ? style.face_red_bias : 0.0) + tex[c];
        }
        const double el = std::hypot(px - (cx - l.rx / 3.0), py - eye_y);
        const double er = std::hypot(px - (cx + l.rx / 3.0), py - eye_y);
        const bool eye = el <= eye_r || er <= eye_r;
        const bool mouth = std::abs(px - cx) <= l.rx / 2.5 && std::abs(py - mouth_y) <= mouth_half_h;
        if (eye || mouth) {
          for (double& v : rgb) v *= style.feature_darkening;
        }
      } else {
        for (std::size_t c = 0; c < 3; ++c) rgb[c] = f.background[(y * w + x) * 3 + c];
      }
      for (std::size_t c = 0; c < 3; ++c) s.image.at(y, x, c) = std::clamp(rgb[c], 0.0, 1.0);
    }
  }
  return s;
}

}  // namespace

SyntheticScene generate_scene(std::uint64_t seed, const SceneStyle& style) {
  return render(draw_fields(seed, style), style, 0.0, seed);
}

std::vector<SyntheticScene> generate_sequence(std::uint64_t seed, std::size_t count,
                                              const SceneStyle& style, double shift_px) {
  if (!std::isfinite(shift_px)) throw DomainError("sequence shift must be finite");
  const SceneFields fields = draw_fields(seed, style);
  std::vector<SyntheticScene> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(render(fields, style, shift_px * static_cast<double>(i), seed));
  }
  return out;
}

}  // namespace vdf
