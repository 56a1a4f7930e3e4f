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

#include <cstddef>

#include "vdf/autodiff.hpp"
#include "vdf/error.hpp"
#include "vdf/kernels.hpp"

namespace vdf::ad {
namespace {

using Index = std::ptrdiff_t;

struct ConvPlan {
  std::size_t h, w, cin, oh, ow, cout;
  ConvGeometry g;
};

ConvPlan plan_conv(const Shape& x, const Shape& weight, const Shape& bias, const ConvGeometry& g) {
  if (g.stride == 0) throw DomainError("conv2d: stride must be >= 1");
  if (weight.h != g.kernel_h * g.kernel_w) {
    throw ShapeError("conv2d: weight taps " + std::to_string(weight.h) + " != kernel " +
                     std::to_string(g.kernel_h) + "x" + std::to_string(g.kernel_w));
  }
  if (weight.w != x.c) {
    throw ShapeError("conv2d: weight expects Cin=" + std::to_string(weight.w) + ", input has " +
                     std::to_string(x.c));
  }
  if (bias.size() != weight.c) throw ShapeError("conv2d: bias length must equal Cout");
  if (x.h + 2 * g.pad < g.kernel_h || x.w + 2 * g.pad < g.kernel_w) {
    throw ShapeError("conv2d: input " + x.str() + " smaller than kernel");
  }
  ConvPlan p{x.h, x.w, x.c, 0, 0, weight.c, g};
  p.oh = (x.h + 2 * g.pad - g.kernel_h) / g.stride + 1;
  p.ow = (x.w + 2 * g.pad - g.kernel_w) / g.stride + 1;
  return p;
}

// Output column range [lo, hi) whose input column ox*s + kx - pad is inside [0, w).
void valid_columns(const ConvPlan& p, std::size_t kx, Index& lo, Index& hi) {
  const Index s = static_cast<Index>(p.g.stride);
  const Index off = static_cast<Index>(kx) - static_cast<Index>(p.g.pad);
  lo = off >= 0 ? 0 : (-off + s - 1) / s;
  const Index last = static_cast<Index>(p.w) - 1 - off;
  hi = last < 0 ? 0 : last / s + 1;
  if (hi > static_cast<Index>(p.ow)) hi = static_cast<Index>(p.ow);
}

// Calls fn(tap, oy, iy, ox0, ix0, count) for every in-bounds strip.
template <typename Fn>
void for_each_strip(const ConvPlan& p, Fn fn) {
  const Index s = static_cast<Index>(p.g.stride);
  const Index pad = static_cast<Index>(p.g.pad);
  for (std::size_t oy = 0; oy < p.oh; ++oy) {
    for (std::size_t ky = 0; ky < p.g.kernel_h; ++ky) {
      const Index iy = static_cast<Index>(oy) * s + static_cast<Index>(ky) - pad;
      if (iy < 0 || iy >= static_cast<Index>(p.h)) continue;
      for (std::size_t kx = 0; kx < p.g.kernel_w; ++kx) {
        Index lo, hi;
        valid_columns(p, kx, lo, hi);
        if (hi <= lo) continue;
        const Index ix0 = lo * s + static_cast<Index>(kx) - pad;
        fn(ky * p.g.kernel_w + kx, oy, static_cast<std::size_t>(iy), static_cast<std::size_t>(lo),
           static_cast<std::size_t>(ix0), static_cast<std::size_t>(hi - lo));
      }
    }
  }
}

}  // namespace

Tensor conv2d_forward(const Tensor& x, const Tensor& weight, const Tensor& bias,
                      const ConvGeometry& g) {
  const ConvPlan p = plan_conv(x.shape(), weight.shape(), bias.shape(), g);
  Tensor y(Shape{p.oh, p.ow, p.cout});
  for (std::size_t i = 0; i < p.oh * p.ow; ++i) {
    for (std::size_t c = 0; c < p.cout; ++c) y[i * p.cout + c] = bias[c];
  }
  const auto& k = kernels::active();
  const std::size_t lda = p.g.stride * p.cin;
  for_each_strip(p, [&](std::size_t tap, std::size_t oy, std::size_t iy, std::size_t ox0,
                        std::size_t ix0, std::size_t count) {
    k.gemm_nn(x.raw() + (iy * p.w + ix0) * p.cin, lda, weight.raw() + tap * p.cin * p.cout,
              y.raw() + (oy * p.ow + ox0) * p.cout, p.cout, count, p.cin, p.cout);
  });
  return y;
}

Var conv2d(const Var& x, const Var& weight, const Var& bias, const ConvGeometry& g) {
  if (&x.tape() != &weight.tape() || &x.tape() != &bias.tape()) {
    throw TapeError("conv2d operands live on different tapes");
  }
  const ConvPlan p = plan_conv(x.shape(), weight.shape(), bias.shape(), g);
  Tape& t = x.tape();
  const bool rg = x.requires_grad() || weight.requires_grad() || bias.requires_grad();
  Var out = t.push(conv2d_forward(x.value(), weight.value(), bias.value(), g), rg);
  if (!rg) return out;

  t.record([&t, p, ix = x.id(), iw = weight.id(), ib = bias.id(), io = out.id()] {
    const Tensor* gout = t.grad_if_any(io);
    if (gout == nullptr) return;
    const auto& k = kernels::active();
    const std::size_t taps = p.g.kernel_h * p.g.kernel_w;
    const std::size_t ld_in = p.g.stride * p.cin;

    if (t.requires_grad(ib)) {
      Tensor& gb = t.grad(ib);
      for (std::size_t i = 0; i < p.oh * p.ow; ++i) {
        for (std::size_t c = 0; c < p.cout; ++c) gb[c] += (*gout)[i * p.cout + c];
      }
    }
    if (t.requires_grad(iw)) {
      const Tensor& xin = t.value(ix);
      Tensor& gw = t.grad(iw);
      for_each_strip(p, [&](std::size_t tap, std::size_t oy, std::size_t iy, std::size_t ox0,
                            std::size_t ix0, std::size_t count) {
        k.gemm_tn(xin.raw() + (iy * p.w + ix0) * p.cin, ld_in,
                  gout->raw() + (oy * p.ow + ox0) * p.cout, p.cout,
                  gw.raw() + tap * p.cin * p.cout, count, p.cin, p.cout);
      });
    }
    if (t.requires_grad(ix)) {
      // Per-tap transposed weights turn the input adjoint into another NN product.
      const Tensor& w = t.value(iw);
      std::vector<double> wt(taps * p.cin * p.cout);
      for (std::size_t tap = 0; tap < taps; ++tap) {
        for (std::size_t ci = 0; ci < p.cin; ++ci) {
          for (std::size_t co = 0; co < p.cout; ++co) {
            wt[(tap * p.cout + co) * p.cin + ci] = w[(tap * p.cin + ci) * p.cout + co];
          }
        }
      }
      Tensor& gx = t.grad(ix);
      for_each_strip(p, [&](std::size_t tap, std::size_t oy, std::size_t iy, std::size_t ox0,
                            std::size_t ix0, std::size_t count) {
        k.gemm_nn(gout->raw() + (oy * p.ow + ox0) * p.cout, p.cout,
                  wt.data() + tap * p.cout * p.cin, gx.raw() + (iy * p.w + ix0) * p.cin, ld_in,
                  count, p.cout, p.cin);
      });
    }
  });
  return out;
}

}  // namespace vdf::ad
