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

#include "vdf/perturbation.hpp"

#include <algorithm>
#include <cmath>

#include "binary_io.hpp"
#include "vdf/error.hpp"

namespace vdf {

std::string to_string(Eq7Mode m) { return m == Eq7Mode::kCanonical ? "canonical" : "literal"; }

Eq7Mode parse_eq7_mode(const std::string& s) {
  if (s == "canonical") return Eq7Mode::kCanonical;
  if (s == "literal") return Eq7Mode::kLiteral;
  throw DomainError("eq7_mode must be canonical or literal, got '" + s + "'");
}

Tensor init_attention(const Mask& face_mask, double inside, double outside) {
  if (!(outside > 0.0 && outside <= inside && inside < 1.0)) {
    throw DomainError("attention init requires 0 < outside <= inside < 1");
  }
  const double li = std::log(inside / (1.0 - inside));
  const double lo = std::log(outside / (1.0 - outside));
  Tensor logits(Shape{face_mask.height(), face_mask.width(), 1});
  for (std::size_t i = 0; i < logits.size(); ++i) logits[i] = face_mask.bits()[i] ? li : lo;
  return logits;
}

PerturbationState zero_state(const Shape& frame, Tensor logits, std::size_t frame_index) {
  if (logits.shape() != Shape{frame.h, frame.w, 1}) {
    throw ShapeError("attention logits " + logits.shape().str() + " do not match frame " + frame.str());
  }
  return PerturbationState{ComplexSpectrum(frame), std::move(logits), frame_index};
}

BudgetBox budget_box(const Tensor& x, double radius) {
  if (!(radius > 0.0 && radius <= 1.0)) throw DomainError("radius must lie in (0, 1]");
  BudgetBox box{Tensor(x.shape()), Tensor(x.shape())};
  for (std::size_t i = 0; i < x.size(); ++i) {
    box.lo[i] = std::max(x[i] - radius, 0.0);
    box.hi[i] = std::min(x[i] + radius, 1.0);
  }
  return box;
}

namespace {

ad::Var gate(const ad::Var& signal, const ad::Var* logits, std::size_t channels) {
  if (logits == nullptr) return signal;
  return ad::mul(signal, ad::broadcast_channels(ad::sigmoid(*logits), channels));
}

void validate(const Tensor& x, const PerturbationState& state) {
  if (state.delta.shape() != x.shape()) {
    throw ShapeError("perturbation " + state.delta.shape().str() + " does not match frame " +
                     x.shape().str());
  }
  if (state.logits.shape() != Shape{x.height(), x.width(), 1}) {
    throw ShapeError("attention logits " + state.logits.shape().str() + " do not match frame " +
                     x.shape().str());
  }
  if (!all_finite(state.delta.re) || !all_finite(state.delta.im)) {
    throw DomainError("perturbation spectrum contains non-finite entries");
  }
}

}  // namespace

ad::Var render_frequency(const Tensor& x, const BudgetBox& box, const ad::CVar& delta,
                         const ad::Var* logits, Eq7Mode mode) {
  ad::Tape& t = delta.re.tape();
  ad::Var xv = t.constant(x);
  const std::size_t c = x.channels();
  ad::Var pre;
  if (mode == Eq7Mode::kCanonical) {
    pre = ad::add(xv, gate(ad::ifft2_real(delta), logits, c));
  } else {
    const ad::CVar spectrum = ad::add(ad::fft2(xv), delta);
    pre = ad::add(gate(ad::ifft2_real(spectrum), logits, c), xv);
  }
  return ad::clamp(pre, box.lo, box.hi);
}

ad::Var render_spatial(const Tensor& x, const BudgetBox& box, const ad::Var& p,
                       const ad::Var* logits, bool clamp_output) {
  ad::Tape& t = p.tape();
  ad::Var pre = ad::add(t.constant(x), gate(p, logits, x.channels()));
  return clamp_output ? ad::clamp(pre, box.lo, box.hi) : pre;
}

Tensor apply(const Tensor& x, const PerturbationState& state, double radius, Eq7Mode mode,
             bool gate) {
  validate(x, state);
  const BudgetBox box = budget_box(x, radius);
  ad::Tape t;
  const ad::CVar delta{t.constant(state.delta.re), t.constant(state.delta.im)};
  ad::Var logits = t.constant(state.logits);
  return render_frequency(x, box, delta, gate ? &logits : nullptr, mode).value();
}

Tensor effective_perturbation(const Tensor& x, const PerturbationState& state, double radius,
                              Eq7Mode mode, bool gate) {
  Tensor p = apply(x, state, radius, mode, gate);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] -= x[i];
  return p;
}

std::vector<std::uint8_t> encode_state(const PerturbationState& state) {
  const Shape& s = state.delta.shape();
  if (state.logits.shape() != Shape{s.h, s.w, 1}) throw ShapeError("state logits shape mismatch");
  detail::ByteWriter w;
  w.magic("VDFS");
  w.u16(kStateFormatVersion);
  w.u32(static_cast<std::uint32_t>(s.h));
  w.u32(static_cast<std::uint32_t>(s.w));
  w.u32(static_cast<std::uint32_t>(s.c));
  for (double v : state.delta.re.values()) w.f64(v);
  for (double v : state.delta.im.values()) w.f64(v);
  for (double v : state.logits.values()) w.f64(v);
  return w.take();
}

PerturbationState decode_state(const std::vector<std::uint8_t>& bytes, std::size_t frame_index) {
  detail::ByteReader r(bytes, "VDFS sidecar");
  r.expect_magic("VDFS");
  const std::uint16_t version = r.u16();
  if (version != kStateFormatVersion) {
    throw IoError("VDFS sidecar: unsupported version " + std::to_string(version));
  }
  const Shape s{r.u32(), r.u32(), r.u32()};
  if (s.size() == 0) throw IoError("VDFS sidecar: empty shape");
  PerturbationState st{ComplexSpectrum(s), Tensor(Shape{s.h, s.w, 1}), frame_index};
  for (double& v : st.delta.re.values()) v = r.f64();
  for (double& v : st.delta.im.values()) v = r.f64();
  for (double& v : st.logits.values()) v = r.f64();
  r.expect_end();
  return st;
}

void write_state(const std::filesystem::path& path, const PerturbationState& state) {
  detail::write_file(path, encode_state(state));
}

PerturbationState read_state(const std::filesystem::path& path, std::size_t frame_index) {
  return decode_state(detail::read_file(path), frame_index);
}

}  // namespace vdf
