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

#include "vdf/autodiff.hpp"
#include "vdf/error.hpp"

namespace vdf::ad {
namespace {

struct Taps {
  std::vector<std::size_t> lo;
  std::vector<std::size_t> hi;
  std::vector<double> frac;
};

// Half-pixel source coordinates, clamped to the border samples.
Taps axis_taps(std::size_t in, std::size_t out, double scale) {
  Taps t;
  t.lo.resize(out);
  t.hi.resize(out);
  t.frac.resize(out);
  const double max_src = static_cast<double>(in - 1);
  for (std::size_t i = 0; i < out; ++i) {
    const double src = std::clamp((static_cast<double>(i) + 0.5) / scale - 0.5, 0.0, max_src);
    const auto lo = static_cast<std::size_t>(std::floor(src));
    t.lo[i] = lo;
    t.hi[i] = std::min(lo + 1, in - 1);
    t.frac[i] = src - static_cast<double>(lo);
  }
  return t;
}

struct ResizePlan {
  Shape in;
  Shape out;
  Taps ys;
  Taps xs;
};

ResizePlan plan_resize(const Shape& in, std::size_t oh, std::size_t ow, double sy, double sx) {
  if (oh == 0 || ow == 0) throw DomainError("resize: degenerate output size");
  return ResizePlan{in, Shape{oh, ow, in.c}, axis_taps(in.h, oh, sy), axis_taps(in.w, ow, sx)};
}

Tensor apply(const ResizePlan& p, const Tensor& x) {
  Tensor y(p.out);
  const std::size_t c = p.in.c;
  for (std::size_t oy = 0; oy < p.out.h; ++oy) {
    const double fy = p.ys.frac[oy];
    const double* r0 = x.raw() + p.ys.lo[oy] * p.in.w * c;
    const double* r1 = x.raw() + p.ys.hi[oy] * p.in.w * c;
    double* dst = y.raw() + oy * p.out.w * c;
    for (std::size_t ox = 0; ox < p.out.w; ++ox) {
      const double fx = p.xs.frac[ox];
      const std::size_t x0 = p.xs.lo[ox] * c;
      const std::size_t x1 = p.xs.hi[ox] * c;
      const double w00 = (1.0 - fy) * (1.0 - fx);
      const double w01 = (1.0 - fy) * fx;
      const double w10 = fy * (1.0 - fx);
      const double w11 = fy * fx;
      for (std::size_t k = 0; k < c; ++k) {
        dst[ox * c + k] = w00 * r0[x0 + k] + w01 * r0[x1 + k] + w10 * r1[x0 + k] + w11 * r1[x1 + k];
      }
    }
  }
  return y;
}

void scatter(const ResizePlan& p, const Tensor& g, Tensor& gx) {
  const std::size_t c = p.in.c;
  for (std::size_t oy = 0; oy < p.out.h; ++oy) {
    const double fy = p.ys.frac[oy];
    double* r0 = gx.raw() + p.ys.lo[oy] * p.in.w * c;
    double* r1 = gx.raw() + p.ys.hi[oy] * p.in.w * c;
    const double* src = g.raw() + oy * p.out.w * c;
    for (std::size_t ox = 0; ox < p.out.w; ++ox) {
      const double fx = p.xs.frac[ox];
      const std::size_t x0 = p.xs.lo[ox] * c;
      const std::size_t x1 = p.xs.hi[ox] * c;
      const double w00 = (1.0 - fy) * (1.0 - fx);
      const double w01 = (1.0 - fy) * fx;
      const double w10 = fy * (1.0 - fx);
      const double w11 = fy * fx;
      for (std::size_t k = 0; k < c; ++k) {
        const double v = src[ox * c + k];
        r0[x0 + k] += w00 * v;
        r0[x1 + k] += w01 * v;
        r1[x0 + k] += w10 * v;
        r1[x1 + k] += w11 * v;
      }
    }
  }
}

Var resize_impl(const Var& x, std::size_t oh, std::size_t ow, double sy, double sx) {
  ResizePlan p = plan_resize(x.shape(), oh, ow, sy, sx);
  Tape& t = x.tape();
  Var out = t.push(apply(p, x.value()), x.requires_grad());
  if (x.requires_grad()) {
    t.record([&t, p = std::move(p), ix = x.id(), io = out.id()] {
      const Tensor* g = t.grad_if_any(io);
      if (g == nullptr) return;
      scatter(p, *g, t.grad(ix));
    });
  }
  return out;
}

}  // namespace

Tensor resize_bilinear_forward(const Tensor& x, std::size_t out_h, std::size_t out_w, double sy,
                               double sx) {
  return apply(plan_resize(x.shape(), out_h, out_w, sy, sx), x);
}

Var resize_bilinear(const Var& x, double scale) {
  const std::size_t oh = scaled_extent(x.shape().h, scale);
  const std::size_t ow = scaled_extent(x.shape().w, scale);
  return resize_impl(x, oh, ow, scale, scale);
}

Var resize_bilinear_to(const Var& x, std::size_t out_h, std::size_t out_w) {
  const double sy = static_cast<double>(out_h) / static_cast<double>(x.shape().h);
  const double sx = static_cast<double>(out_w) / static_cast<double>(x.shape().w);
  return resize_impl(x, out_h, out_w, sy, sx);
}

}  // namespace vdf::ad
