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

#include "vdf/autodiff.hpp"
#include "vdf/error.hpp"
#include "vdf/fft.hpp"

namespace vdf::ad {

// X = F x for real x. With upstream adjoints (gR, gI) on (Re X, Im X):
//   dL/dx = Re( F^H (gR + i gI) ) = H W * Re( ifft(gR + i gI) ).
CVar fft2(const Var& x) {
  Tape& t = x.tape();
  ComplexSpectrum s = fft::forward(x.value());
  const bool rg = x.requires_grad();
  Var re = t.push(std::move(s.re), rg);
  Var im = t.push(std::move(s.im), rg);
  if (rg) {
    t.record([&t, ix = x.id(), ir = re.id(), ii = im.id()] {
      const Tensor* gr = t.grad_if_any(ir);
      const Tensor* gi = t.grad_if_any(ii);
      if (gr == nullptr && gi == nullptr) return;
      const Shape& shape = t.value(ix).shape();
      ComplexSpectrum g(gr != nullptr ? *gr : Tensor(shape, 0.0),
                        gi != nullptr ? *gi : Tensor(shape, 0.0));
      Tensor back = fft::inverse_real(g);
      back *= static_cast<double>(shape.pixels());
      t.grad(ix) += back;
    });
  }
  return CVar{re, im};
}

// y = Re( ifft(R + i I) ). With upstream g (real):
//   dL/dR = Re(F g) / (H W),  dL/dI = Im(F g) / (H W).
Var ifft2_real(const CVar& spectrum) {
  if (&spectrum.re.tape() != &spectrum.im.tape()) {
    throw TapeError("ifft2_real planes live on different tapes");
  }
  require_same_shape(spectrum.re.value(), spectrum.im.value(), "ifft2_real");
  Tape& t = spectrum.re.tape();
  const bool rg = spectrum.re.requires_grad() || spectrum.im.requires_grad();
  Var out = t.push(fft::inverse_real(ComplexSpectrum(spectrum.re.value(), spectrum.im.value())), rg);
  if (rg) {
    t.record([&t, ir = spectrum.re.id(), ii = spectrum.im.id(), io = out.id()] {
      const Tensor* g = t.grad_if_any(io);
      if (g == nullptr) return;
      ComplexSpectrum fg = fft::forward(*g);
      const double norm = 1.0 / static_cast<double>(g->shape().pixels());
      if (t.requires_grad(ir)) {
        fg.re *= norm;
        t.grad(ir) += fg.re;
      }
      if (t.requires_grad(ii)) {
        fg.im *= norm;
        t.grad(ii) += fg.im;
      }
    });
  }
  return out;
}

CVar add(const CVar& a, const CVar& b) { return CVar{add(a.re, b.re), add(a.im, b.im)}; }

}  // namespace vdf::ad
