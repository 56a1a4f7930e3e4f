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

// Tensor-level reverse-mode differentiation.
//
// A Tape records primitive evaluations in order. Each primitive stores an
// adjoint closure only when at least one input depends on a registered
// variable, so forward-only evaluation (rates, feature extraction) costs no
// more than plain arithmetic. A tape is single-use: one forward build, one
// backward sweep. Tapes are not thread-safe; build independent tapes on
// independent threads.

#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "vdf/tensor.hpp"

namespace vdf::ad {

class Tape;

class Var {
 public:
  Var() = default;

  Tape& tape() const { return *tape_; }
  std::uint32_t id() const { return id_; }
  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  bool requires_grad() const;
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::uint32_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::uint32_t id_ = 0;
};

struct CVar {
  Var re;
  Var im;
};

class Gradients {
 public:
  // Gradient of the output with respect to a registered variable.
  const Tensor& of(const Var& v) const;
  std::size_t size() const { return grads_.size(); }

 private:
  friend class Tape;
  std::vector<std::uint32_t> ids_;
  std::vector<Tensor> grads_;
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Registers a differentiable input.
  Var variable(Tensor value);
  Var constant(Tensor value);

  // Reverse sweep from a 1x1x1 output. Consumes the tape.
  Gradients backward(const Var& output);

  bool consumed() const { return consumed_; }
  std::size_t node_count() const { return nodes_.size(); }

  // ---- primitive authoring interface ----
  const Tensor& value(std::uint32_t id) const { return nodes_[id].value; }
  bool requires_grad(std::uint32_t id) const { return nodes_[id].requires_grad; }
  Var push(Tensor value, bool requires_grad);
  void record(std::function<void()> adjoint);
  // Accumulator for the adjoint of node `id`, zero-initialised on first use.
  Tensor& grad(std::uint32_t id);
  // Adjoint of node `id` if anything was accumulated into it.
  const Tensor* grad_if_any(std::uint32_t id) const;

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
  };

  void ensure_live() const;

  std::deque<Node> nodes_;
  std::vector<std::function<void()>> adjoints_;
  std::vector<std::uint32_t> variables_;
  bool consumed_ = false;
};

// ---- elementwise ----
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& a, double s);
Var add_scalar(const Var& a, double s);
Var relu(const Var& a);
Var sigmoid(const Var& a);
// ln(max(v, 1e-12))
Var log_stable(const Var& a);
constexpr double kLogFloor = 1e-12;
// Gradient passes where lo < v < hi, zero elsewhere.
Var clamp(const Var& a, double lo, double hi);
// Per-element bounds (constants).
Var clamp(const Var& a, const Tensor& lo, const Tensor& hi);

// ---- reductions ----
Var sum(const Var& a);
Var mean(const Var& a);
// Mean over set mask pixels and all channels. Throws DomainError on an
// empty mask.
Var mean_masked(const Var& a, const Mask& mask);
// sum_i (a_i - b_i)^2 / n with b constant.
Var mean_squared_distance(const Var& a, const Tensor& b);

// ---- channel ops ----
Var channel_softmax(const Var& a);
// Mean over pixels of -log softmax(logits)[label]; labels has H*W entries.
Var softmax_cross_entropy(const Var& logits, std::span<const std::uint8_t> labels);
// H x W x 1 sum of the listed channels.
Var channel_sum(const Var& a, std::span<const std::size_t> channels);
// H x W x 1 -> H x W x C.
Var broadcast_channels(const Var& a, std::size_t channels);

// ---- spatial ----
struct ConvGeometry {
  std::size_t kernel_h = 3;
  std::size_t kernel_w = 3;
  std::size_t stride = 1;
  std::size_t pad = 1;
};
// weight packed (KH*KW, Cin, Cout); bias 1 x 1 x Cout. Zero padding.
Var conv2d(const Var& x, const Var& weight, const Var& bias, const ConvGeometry& g);
// Half-pixel bilinear, src = (dst + 0.5) / scale - 0.5 clamped to borders.
Var resize_bilinear(const Var& x, double scale);
Var resize_bilinear_to(const Var& x, std::size_t out_h, std::size_t out_w);

// ---- spectral ----
CVar fft2(const Var& x);
Var ifft2_real(const CVar& spectrum);
CVar add(const CVar& a, const CVar& b);

// Scalar node whose value and gradient with respect to `input` were computed
// elsewhere (typically on another tape, on another thread).
Var precomputed_scalar(const Var& input, double value, Tensor d_value_d_input);

// Plain (tape-free) implementations shared with non-differentiable callers.
Tensor conv2d_forward(const Tensor& x, const Tensor& weight, const Tensor& bias,
                      const ConvGeometry& g);
Tensor resize_bilinear_forward(const Tensor& x, std::size_t out_h, std::size_t out_w, double sy,
                               double sx);
Tensor channel_softmax_forward(const Tensor& x);

}  // namespace vdf::ad
