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
#include "vdf/kernels.hpp"

namespace vdf::ad {
namespace {

void same_tape(const Var& a, const Var& b) {
  if (&a.tape() != &b.tape()) throw TapeError("operands live on different tapes");
}

// out = f(a) elementwise; adjoint g * dfdx(a_i, out_i).
template <typename F, typename D>
Var unary(const Var& a, F f, D dfdx) {
  Tape& t = a.tape();
  const Tensor& x = a.value();
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
  Var out = t.push(std::move(y), a.requires_grad());
  if (a.requires_grad()) {
    t.record([&t, ia = a.id(), io = out.id(), dfdx] {
      const Tensor* g = t.grad_if_any(io);
      if (g == nullptr) return;
      const Tensor& x = t.value(ia);
      const Tensor& y = t.value(io);
      Tensor& gx = t.grad(ia);
      for (std::size_t i = 0; i < x.size(); ++i) gx[i] += (*g)[i] * dfdx(x[i], y[i]);
    });
  }
  return out;
}

}  // namespace

Var add(const Var& a, const Var& b) {
  same_tape(a, b);
  require_same_shape(a.value(), b.value(), "add");
  Tape& t = a.tape();
  Tensor y = a.value();
  y += b.value();
  const bool rg = a.requires_grad() || b.requires_grad();
  Var out = t.push(std::move(y), rg);
  if (rg) {
    t.record([&t, ia = a.id(), ib = b.id(), io = out.id()] {
      const Tensor* g = t.grad_if_any(io);
      if (g == nullptr) return;
      if (t.requires_grad(ia)) t.grad(ia) += *g;
      if (t.requires_grad(ib)) t.grad(ib) += *g;
    });
  }
  return out;
}

Var sub(const Var& a, const Var& b) {
  same_tape(a, b);
  require_same_shape(a.value(), b.value(), "sub");
  Tape& t = a.tape();
  Tensor y = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= bv[i];
  const bool rg = a.requires_grad() || b.requires_grad();
  Var out = t.push(std::move(y), rg);
  if (rg) {
    t.record([&t, ia = a.id(), ib = b.id(), io = out.id()] {
      const Tensor* g = t.grad_if_any(io);
      if (g == nullptr) return;
      if (t.requires_grad(ia)) t.grad(ia) += *g;
      if (t.requires_grad(ib)) {
        Tensor& gb = t.grad(ib);
        for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= (*g)[i];
      }
    });
  }
  return out;
}

Var mul(const Var& a, const Var& b) {
  same_tape(a, b);
  require_same_shape(a.value(), b.value(), "mul");
  Tape& t = a.tape();
  Tensor y = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= bv[i];
  const bool rg = a.requires_grad() || b.requires_grad();
  Var out = t.push(std::move(y), rg);
  if (rg) {
    t.record([&t, ia = a.id(), ib = b.id(), io = out.id()] {
      const Tensor* g = t.grad_if_any(io);
      if (g == nullptr) return;
      if (t.requires_grad(ia)) {
        Tensor& ga = t.grad(ia);
        const Tensor& bv = t.value(ib);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += (*g)[i] * bv[i];
      }
      if (t.requires_grad(ib)) {
        Tensor& gb = t.grad(ib);
        const Tensor& av = t.value(ia);
        for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += (*g)[i] * av[i];
      }
    });
  }
  return out;
}

Var scale(const Var& a, double s) {
  return unary(a, [s](double v) { return s * v; }, [s](double, double) { return s; });
}

Var add_scalar(const Var& a, double s) {
  return unary(a, [s](double v) { return v + s; }, [](double, double) { return 1.0; });
}

Var relu(const Var& a) {
  return unary(
      a, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Var sigmoid(const Var& a) {
  return unary(
      a,
      [](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var log_stable(const Var& a) {
  return unary(
      a, [](double v) { return std::log(std::max(v, kLogFloor)); },
      [](double v, double) { return v > kLogFloor ? 1.0 / v : 0.0; });
}

Var clamp(const Var& a, double lo, double hi) {
  if (!(lo <= hi)) throw DomainError("clamp bounds out of order");
  return unary(
      a, [lo, hi](double v) { return std::clamp(v, lo, hi); },
      [lo, hi](double v, double) { return (v > lo && v < hi) ? 1.0 : 0.0; });
}

Var clamp(const Var& a, const Tensor& lo, const Tensor& hi) {
  require_same_shape(a.value(), lo, "clamp lower bound");
  require_same_shape(a.value(), hi, "clamp upper bound");
  Tape& t = a.tape();
  const Tensor& x = a.value();
  Tensor y(x.shape());
  // Pass-through pattern is saved so the adjoint does not need the bounds.
  std::vector<unsigned char> inside(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (lo[i] > hi[i]) throw DomainError("clamp bounds out of order");
    y[i] = std::clamp(x[i], lo[i], hi[i]);
    inside[i] = (x[i] > lo[i] && x[i] < hi[i]) ? 1 : 0;
  }
  Var out = t.push(std::move(y), a.requires_grad());
  if (a.requires_grad()) {
    t.record([&t, ia = a.id(), io = out.id(), inside = std::move(inside)] {
      const Tensor* g = t.grad_if_any(io);
      if (g == nullptr) return;
      Tensor& gx = t.grad(ia);
      for (std::size_t i = 0; i < gx.size(); ++i) {
        if (inside[i]) gx[i] += (*g)[i];
      }
    });
  }
  return out;
}

Var sum(const Var& a) {
  Tape& t = a.tape();
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  Var out = t.push(Tensor::scalar(s), a.requires_grad());
  if (a.requires_grad()) {
    t.record([&t, ia = a.id(), io = out.id()] {
      const Tensor* g = t.grad_if_any(io);
      if (g == nullptr) return;
      const double gv = (*g)[0];
      for (double& v : t.grad(ia).values()) v += gv;
    });
  }
  return out;
}

Var mean(const Var& a) { return scale(sum(a), 1.0 / static_cast<double>(a.value().size())); }

Var mean_masked(const Var& a, const Mask& mask) {
  const Shape& s = a.shape();
  if (mask.height() != s.h || mask.width() != s.w) {
    throw ShapeError("mean_masked: mask " + std::to_string(mask.height()) + "x" +
                     std::to_string(mask.width()) + " vs tensor " + s.str());
  }
  const std::size_t count = mask.count();
  if (count == 0) throw DomainError("mean_masked: empty mask");
  const double norm = 1.0 / static_cast<double>(count * s.c);
  const Tensor& x = a.value();
  double acc = 0.0;
  for (std::size_t p = 0; p < s.pixels(); ++p) {
    if (!mask.bits()[p]) continue;
    for (std::size_t c = 0; c < s.c; ++c) acc += x[p * s.c + c];
  }
  Tape& t = a.tape();
  Var out = t.push(Tensor::scalar(acc * norm), a.requires_grad());
  if (a.requires_grad()) {
    t.record([&t, ia = a.id(), io = out.id(), mask, norm] {
      const Tensor* g = t.grad_if_any(io);
      if (g == nullptr) return;
      const double gv = (*g)[0] * norm;
      Tensor& gx = t.grad(ia);
      const std::size_t c = gx.channels();
      for (std::size_t p = 0; p < mask.bits().size(); ++p) {
        if (!mask.bits()[p]) continue;
        for (std::size_t k = 0; k < c; ++k) gx[p * c + k] += gv;
      }
    });
  }
  return out;
}

Var mean_squared_distance(const Var& a, const Tensor& b) {
  require_same_shape(a.value(), b, "mean_squared_distance");
  const std::size_t n = b.size();
  const double d = kernels::active().squared_distance(a.value().raw(), b.raw(), n);
  Tape& t = a.tape();
  Var out = t.push(Tensor::scalar(d / static_cast<double>(n)), a.requires_grad());
  if (a.requires_grad()) {
    t.record([&t, ia = a.id(), io = out.id(), b] {
      const Tensor* g = t.grad_if_any(io);
      if (g == nullptr) return;
      const double k = 2.0 * (*g)[0] / static_cast<double>(b.size());
      const Tensor& x = t.value(ia);
      Tensor& gx = t.grad(ia);
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += k * (x[i] - b[i]);
    });
  }
  return out;
}

Tensor channel_softmax_forward(const Tensor& x) {
  const Shape& s = x.shape();
  Tensor y(s);
  for (std::size_t p = 0; p < s.pixels(); ++p) {
    const double* in = x.raw() + p * s.c;
    double* out = y.raw() + p * s.c;
    const double m = *std::max_element(in, in + s.c);
    double z = 0.0;
    for (std::size_t c = 0; c < s.c; ++c) {
      out[c] = std::exp(in[c] - m);
      z += out[c];
    }
    for (std::size_t c = 0; c < s.c; ++c) out[c] /= z;
  }
  return y;
}

Var channel_softmax(const Var& a) {
  if (a.shape().c < 2) throw ShapeError("channel_softmax needs at least two channels");
  Tape& t = a.tape();
  Var out = t.push(channel_softmax_forward(a.value()), a.requires_grad());
  if (a.requires_grad()) {
    t.record([&t, ia = a.id(), io = out.id()] {
      const Tensor* g = t.grad_if_any(io);
      if (g == nullptr) return;
      const Tensor& y = t.value(io);
      Tensor& gx = t.grad(ia);
      const std::size_t c = y.channels();
      for (std::size_t p = 0; p < y.shape().pixels(); ++p) {
        const double* yp = y.raw() + p * c;
        const double* gp = g->raw() + p * c;
        double dot = 0.0;
        for (std::size_t k = 0; k < c; ++k) dot += gp[k] * yp[k];
        double* gxp = gx.raw() + p * c;
        for (std::size_t k = 0; k < c; ++k) gxp[k] += yp[k] * (gp[k] - dot);
      }
    });
  }
  return out;
}

Var channel_sum(const Var& a, std::span<const std::size_t> channels) {
  const Shape& s = a.shape();
  for (std::size_t ch : channels) {
    if (ch >= s.c) throw ShapeError("channel_sum: channel index out of range");
  }
  Tensor y(Shape{s.h, s.w, 1});
  const Tensor& x = a.value();
  for (std::size_t p = 0; p < s.pixels(); ++p) {
    double acc = 0.0;
    for (std::size_t ch : channels) acc += x[p * s.c + ch];
    y[p] = acc;
  }
  Tape& t = a.tape();
  Var out = t.push(std::move(y), a.requires_grad());
  if (a.requires_grad()) {
    std::vector<std::size_t> chans(channels.begin(), channels.end());
    t.record([&t, ia = a.id(), io = out.id(), chans = std::move(chans)] {
      const Tensor* g = t.grad_if_any(io);
      if (g == nullptr) return;
      Tensor& gx = t.grad(ia);
      const std::size_t c = gx.channels();
      for (std::size_t p = 0; p < g->size(); ++p) {
        for (std::size_t ch : chans) gx[p * c + ch] += (*g)[p];
      }
    });
  }
  return out;
}

Var broadcast_channels(const Var& a, std::size_t channels) {
  const Shape& s = a.shape();
  if (s.c != 1) throw ShapeError("broadcast_channels expects a single-channel input");
  Tensor y(Shape{s.h, s.w, channels});
  const Tensor& x = a.value();
  for (std::size_t p = 0; p < s.pixels(); ++p) {
    for (std::size_t c = 0; c < channels; ++c) y[p * channels + c] = x[p];
  }
  Tape& t = a.tape();
  Var out = t.push(std::move(y), a.requires_grad());
  if (a.requires_grad()) {
    t.record([&t, ia = a.id(), io = out.id(), channels] {
      const Tensor* g = t.grad_if_any(io);
      if (g == nullptr) return;
      Tensor& gx = t.grad(ia);
      for (std::size_t p = 0; p < gx.size(); ++p) {
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c) acc += (*g)[p * channels + c];
        gx[p] += acc;
      }
    });
  }
  return out;
}

Var precomputed_scalar(const Var& input, double value, Tensor d_value_d_input) {
  require_same_shape(input.value(), d_value_d_input, "precomputed_scalar gradient");
  Tape& t = input.tape();
  Var out = t.push(Tensor::scalar(value), input.requires_grad());
  if (input.requires_grad()) {
    t.record([&t, ii = input.id(), io = out.id(), d = std::move(d_value_d_input)] {
      const Tensor* g = t.grad_if_any(io);
      if (g == nullptr) return;
      const double gv = (*g)[0];
      Tensor& gx = t.grad(ii);
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gv * d[i];
    });
  }
  return out;
}

}  // namespace vdf::ad

namespace vdf::ad {

Var softmax_cross_entropy(const Var& logits, std::span<const std::uint8_t> labels) {
  const Shape& s = logits.shape();
  if (labels.size() != s.pixels()) throw ShapeError("softmax_cross_entropy: label count mismatch");
  Tensor probs = channel_softmax_forward(logits.value());
  double loss = 0.0;
  for (std::size_t p = 0; p < s.pixels(); ++p) {
    if (labels[p] >= s.c) throw ShapeError("softmax_cross_entropy: label out of range");
    loss -= std::log(std::max(probs[p * s.c + labels[p]], kLogFloor));
  }
  const double norm = 1.0 / static_cast<double>(s.pixels());
  Tape& t = logits.tape();
  Var out = t.push(Tensor::scalar(loss * norm), logits.requires_grad());
  if (logits.requires_grad()) {
    std::vector<std::uint8_t> lab(labels.begin(), labels.end());
    t.record([&t, il = logits.id(), io = out.id(), probs = std::move(probs), lab = std::move(lab),
              norm] {
      const Tensor* g = t.grad_if_any(io);
      if (g == nullptr) return;
      const double k = (*g)[0] * norm;
      Tensor& gx = t.grad(il);
      const std::size_t c = gx.channels();
      for (std::size_t p = 0; p < lab.size(); ++p) {
        for (std::size_t ch = 0; ch < c; ++ch) {
          const double target = ch == lab[p] ? 1.0 : 0.0;
          gx[p * c + ch] += k * (probs[p * c + ch] - target);
        }
      }
    });
  }
  return out;
}

}  // namespace vdf::ad
