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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace vdf {

/// Height x width x channels. Storage is row-major HWC: element (h, w, c)
/// lives at (h * W + w) * C + c.
struct Shape {
  std::size_t h = 1;
  std::size_t w = 1;
  std::size_t c = 1;

  std::size_t size() const { return h * w * c; }
  std::size_t pixels() const { return h * w; }
  bool operator==(const Shape&) const = default;
  std::string str() const;
};

/// Dense real tensor. Frames hold values in [0, 1]; intermediates are
/// unrestricted. Also used for convolution weights packed as
/// (KH*KW, Cin, Cout).
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor scalar(double v) { return Tensor(Shape{1, 1, 1}, v); }

  const Shape& shape() const { return shape_; }
  std::size_t height() const { return shape_.h; }
  std::size_t width() const { return shape_.w; }
  std::size_t channels() const { return shape_.c; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(std::size_t h, std::size_t w, std::size_t c = 0) {
    return data_[(h * shape_.w + w) * shape_.c + c];
  }
  double at(std::size_t h, std::size_t w, std::size_t c = 0) const {
    return data_[(h * shape_.w + w) * shape_.c + c];
  }

  double* raw() { return data_.data(); }
  const double* raw() const { return data_.data(); }
  std::span<double> values() & { return data_; }
  std::span<const double> values() const& { return data_; }
  // A span into a temporary would dangle inside a range-for.
  std::span<const double> values() const&& = delete;

  // Scalar value of a 1x1x1 tensor.
  double item() const;

  Tensor& operator+=(const Tensor& other);
  Tensor& operator*=(double s);

  // Elementwise value equality (IEEE semantics).
  bool operator==(const Tensor&) const = default;

 private:
  Shape shape_{0, 0, 0};
  std::vector<double> data_;
};

/// Complex array co-shaped with the image it transforms; split planes.
struct ComplexSpectrum {
  Tensor re;
  Tensor im;

  ComplexSpectrum() = default;
  explicit ComplexSpectrum(Shape shape) : re(shape), im(shape) {}
  ComplexSpectrum(Tensor real, Tensor imag);

  const Shape& shape() const { return re.shape(); }
};

/// Binary H x W mask (0 or 1 per pixel).
class Mask {
 public:
  Mask() = default;
  Mask(std::size_t h, std::size_t w, bool fill = false);

  std::size_t height() const { return h_; }
  std::size_t width() const { return w_; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }

  bool operator()(std::size_t y, std::size_t x) const { return bits_[y * w_ + x] != 0; }
  void set(std::size_t y, std::size_t x, bool v) { bits_[y * w_ + x] = v ? 1 : 0; }
  const std::vector<unsigned char>& bits() const& { return bits_; }
  const std::vector<unsigned char>& bits() const&& = delete;
  bool operator==(const Mask&) const = default;

 private:
  std::size_t h_ = 0;
  std::size_t w_ = 0;
  std::vector<unsigned char> bits_;
};

void require_same_shape(const Tensor& a, const Tensor& b, const char* what);
double max_abs_diff(const Tensor& a, const Tensor& b);
bool all_finite(const Tensor& t);

/// Nearest-neighbour resize of a binary mask with the same half-pixel
/// convention as the bilinear resize: src = floor((dst + 0.5) / scale).
Mask resize_nearest(const Mask& mask, double scale);
Mask resize_nearest_to(const Mask& mask, std::size_t out_h, std::size_t out_w);

/// Rounded output extent of a resize, round(n * scale); throws DomainError
/// when it would be zero.
std::size_t scaled_extent(std::size_t n, double scale);

}  // namespace vdf
