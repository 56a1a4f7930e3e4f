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

#include "vdf/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "vdf/error.hpp"

namespace vdf {

std::string Shape::str() const {
  return std::to_string(h) + "x" + std::to_string(w) + "x" + std::to_string(c);
}

Tensor::Tensor(Shape shape, double fill) : shape_(shape), data_(shape.size(), fill) {
  if (shape.h == 0 || shape.w == 0 || shape.c == 0) {
    throw ShapeError("tensor dimensions must be positive, got " + shape.str());
  }
}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
  if (shape.h == 0 || shape.w == 0 || shape.c == 0) {
    throw ShapeError("tensor dimensions must be positive, got " + shape.str());
  }
  if (data_.size() != shape.size()) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " does not match shape " + shape.str());
  }
}

double Tensor::item() const {
  if (data_.size() != 1) throw ShapeError("item() on non-scalar tensor " + shape_.str());
  return data_[0];
}

Tensor& Tensor::operator+=(const Tensor& other) {
  require_same_shape(*this, other, "tensor +=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Tensor& Tensor::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

ComplexSpectrum::ComplexSpectrum(Tensor real, Tensor imag) : re(std::move(real)), im(std::move(imag)) {
  require_same_shape(re, im, "complex spectrum planes");
}

Mask::Mask(std::size_t h, std::size_t w, bool fill) : h_(h), w_(w), bits_(h * w, fill ? 1 : 0) {}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(what) + ": shape mismatch " + a.shape().str() + " vs " +
                     b.shape().str());
  }
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

bool all_finite(const Tensor& t) {
  return std::all_of(t.values().begin(), t.values().end(), [](double v) { return std::isfinite(v); });
}

std::size_t scaled_extent(std::size_t n, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw DomainError("resize scale must be positive and finite");
  }
  const double r = std::round(static_cast<double>(n) * scale);
  if (r < 1.0) {
    throw DomainError("resize by " + std::to_string(scale) + " of extent " + std::to_string(n) +
                      " rounds to zero");
  }
  return static_cast<std::size_t>(r);
}

Mask resize_nearest_to(const Mask& mask, std::size_t out_h, std::size_t out_w) {
  const double sy = static_cast<double>(out_h) / static_cast<double>(mask.height());
  const double sx = static_cast<double>(out_w) / static_cast<double>(mask.width());
  Mask out(out_h, out_w);
  for (std::size_t y = 0; y < out_h; ++y) {
    auto sy_i = static_cast<std::size_t>(std::floor((static_cast<double>(y) + 0.5) / sy));
    sy_i = std::min(sy_i, mask.height() - 1);
    for (std::size_t x = 0; x < out_w; ++x) {
      auto sx_i = static_cast<std::size_t>(std::floor((static_cast<double>(x) + 0.5) / sx));
      sx_i = std::min(sx_i, mask.width() - 1);
      out.set(y, x, mask(sy_i, sx_i));
    }
  }
  return out;
}

Mask resize_nearest(const Mask& mask, double scale) {
  return resize_nearest_to(mask, scaled_extent(mask.height(), scale),
                           scaled_extent(mask.width(), scale));
}

}  // namespace vdf
