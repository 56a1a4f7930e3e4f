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

#include "vdf/metrics.hpp"

#include <cmath>
#include <limits>

#include "vdf/error.hpp"
#include "vdf/fft.hpp"

namespace vdf {

namespace {

std::array<double, kSsimWindow> gaussian_1d() {
  std::array<double, kSsimWindow> g{};
  const double centre = (kSsimWindow - 1) / 2.0;
  double total = 0.0;
  for (std::size_t i = 0; i < kSsimWindow; ++i) {
    const double d = static_cast<double>(i) - centre;
    g[i] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
    total += g[i];
  }
  for (double& v : g) v /= total;
  return g;
}

// Separable valid-mode Gaussian filter of one channel.
std::vector<double> blur_valid(const std::vector<double>& in, std::size_t h, std::size_t w) {
  const std::array<double, kSsimWindow> g = gaussian_1d();
  const std::size_t ow = w - kSsimWindow + 1, oh = h - kSsimWindow + 1;
  std::vector<double> rows(h * ow, 0.0);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < kSsimWindow; ++k) acc += g[k] * in[y * w + x + k];
      rows[y * ow + x] = acc;
    }
  }
  std::vector<double> out(oh * ow, 0.0);
  for (std::size_t y = 0; y < oh; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < kSsimWindow; ++k) acc += g[k] * rows[(y + k) * ow + x];
      out[y * ow + x] = acc;
    }
  }
  return out;
}

}  // namespace

std::array<double, kSsimWindow * kSsimWindow> ssim_window() {
  const std::array<double, kSsimWindow> g = gaussian_1d();
  std::array<double, kSsimWindow * kSsimWindow> w{};
  for (std::size_t i = 0; i < kSsimWindow; ++i) {
    for (std::size_t j = 0; j < kSsimWindow; ++j) w[i * kSsimWindow + j] = g[i] * g[j];
  }
  return w;
}

double ssim(const Tensor& x, const Tensor& y) {
  require_same_shape(x, y, "ssim");
  const Shape& s = x.shape();
  if (s.h < kSsimWindow || s.w < kSsimWindow) {
    throw ShapeError("ssim needs frames of at least 11x11, got " + s.str());
  }
  constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  const std::size_t n = s.pixels();
  double channel_sum = 0.0;
  for (std::size_t c = 0; c < s.c; ++c) {
    std::vector<double> a(n), b(n), aa(n), bb(n), ab(n);
    for (std::size_t p = 0; p < n; ++p) {
      a[p] = x[p * s.c + c];
      b[p] = y[p * s.c + c];
      aa[p] = a[p] * a[p];
      bb[p] = b[p] * b[p];
      ab[p] = a[p] * b[p];
    }
    const auto mu_a = blur_valid(a, s.h, s.w), mu_b = blur_valid(b, s.h, s.w);
    const auto e_aa = blur_valid(aa, s.h, s.w), e_bb = blur_valid(bb, s.h, s.w);
    const auto e_ab = blur_valid(ab, s.h, s.w);
    double acc = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
      const double va = e_aa[i] - mu_a[i] * mu_a[i];
      const double vb = e_bb[i] - mu_b[i] * mu_b[i];
      const double cov = e_ab[i] - mu_a[i] * mu_b[i];
      acc += ((2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2)) /
             ((mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (va + vb + c2));
    }
    channel_sum += acc / static_cast<double>(mu_a.size());
  }
  return channel_sum / static_cast<double>(s.c);
}

double psnr(const Tensor& x, const Tensor& y) {
  require_same_shape(x, y, "psnr");
  double mse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    mse += d * d;
  }
  mse /= static_cast<double>(x.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

BandEnergy band_energy(const Tensor& x) {
  const Shape& s = x.shape();
  const ComplexSpectrum X = fft::forward(x);
  const double radius = static_cast<double>(std::min(s.h, s.w)) / 2.0;
  double bands[3] = {0.0, 0.0, 0.0};
  for (std::size_t u = 0; u < s.h; ++u) {
    // Signed frequency index: the centred spectrum puts DC at the origin.
    const double fu = u <= s.h / 2 ? static_cast<double>(u) : static_cast<double>(u) - s.h;
    for (std::size_t v = 0; v < s.w; ++v) {
      const double fv = v <= s.w / 2 ? static_cast<double>(v) : static_cast<double>(v) - s.w;
      const double r = std::hypot(fu, fv);
      const std::size_t band = r <= radius / 3.0 ? 0 : (r <= 2.0 * radius / 3.0 ? 1 : 2);
      for (std::size_t c = 0; c < s.c; ++c) {
        const std::size_t i = (u * s.w + v) * s.c + c;
        bands[band] += X.re[i] * X.re[i] + X.im[i] * X.im[i];
      }
    }
  }
  const double total = bands[0] + bands[1] + bands[2];
  if (total == 0.0) return BandEnergy{1.0, 0.0, 0.0};
  return BandEnergy{bands[0] / total, bands[1] / total, bands[2] / total};
}

}  // namespace vdf
