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

#include "vdf/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace vdf::fft {
namespace {

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using Buffer = std::unique_ptr<fftw_complex[], FftwFree>;

Buffer allocate(std::size_t n) {
  auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (p == nullptr) throw std::bad_alloc();
  return Buffer(p);
}

// FFTW planning is not thread-safe; execution with fftw_execute_dft is.
// Plans are estimated (never measured) so they are reproducible.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(const Shape& s, int sign) {
    const auto key = std::make_tuple(s.h, s.w, s.c, sign);
    std::lock_guard lock(mu_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t n = s.size();
    Buffer in = allocate(n);
    Buffer out = allocate(n);
    const int dims[2] = {static_cast<int>(s.h), static_cast<int>(s.w)};
    const int stride = static_cast<int>(s.c);
    fftw_plan plan = fftw_plan_many_dft(2, dims, stride, in.get(), nullptr, stride, 1, out.get(),
                                        nullptr, stride, 1, sign, FFTW_ESTIMATE);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

ComplexSpectrum run(const Tensor& re, const Tensor* im, int sign, double scale) {
  const Shape& s = re.shape();
  const std::size_t n = s.size();
  Buffer in = allocate(n);
  Buffer out = allocate(n);
  for (std::size_t i = 0; i < n; ++i) {
    in[i][0] = re[i];
    in[i][1] = im != nullptr ? (*im)[i] : 0.0;
  }
  fftw_execute_dft(cache().get(s, sign), in.get(), out.get());
  ComplexSpectrum result(s);
  for (std::size_t i = 0; i < n; ++i) {
    result.re[i] = out[i][0] * scale;
    result.im[i] = out[i][1] * scale;
  }
  return result;
}

}  // namespace

ComplexSpectrum forward(const Tensor& x) { return run(x, nullptr, FFTW_FORWARD, 1.0); }

ComplexSpectrum forward(const ComplexSpectrum& x) { return run(x.re, &x.im, FFTW_FORWARD, 1.0); }

ComplexSpectrum inverse(const ComplexSpectrum& spectrum) {
  const double scale = 1.0 / static_cast<double>(spectrum.shape().pixels());
  return run(spectrum.re, &spectrum.im, FFTW_BACKWARD, scale);
}

Tensor inverse_real(const ComplexSpectrum& spectrum) { return inverse(spectrum).re; }

}  // namespace vdf::fft
