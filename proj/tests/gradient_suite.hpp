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

// Finite-difference sweeps shared by the unit tests and the acceptance
// binary: every differentiable primitive, and the full objective of
// (spectrum, attention logits) on 16x16 frames.

#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "oracles.hpp"
#include "vdf/autodiff.hpp"
#include "vdf/losses.hpp"
#include "vdf/models.hpp"
#include "vdf/perturbation.hpp"

namespace vdf::testing {

struct SuiteResult {
  std::size_t checks = 0;      // gradient components compared
  std::vector<std::string> failures;
  double seconds = 0.0;
};

using Builder = std::function<ad::Var(const ad::Var&)>;

// L(x) = sum(W * op(x)) with a fixed random W, so every output element of a
// non-scalar primitive contributes to the checked gradient.
inline double weighted_output(const Builder& op, const Tensor& x, std::uint64_t seed, Tensor* grad) {
  ad::Tape t;
  ad::Var xv = grad != nullptr ? t.variable(x) : t.constant(x);
  ad::Var y = op(xv);
  ad::Var w = t.constant(random_tensor(y.shape(), seed ^ 0x5eedULL, -1.0, 1.0));
  ad::Var loss = ad::sum(ad::mul(y, w));
  const double value = loss.value().item();
  if (grad != nullptr) *grad = t.backward(loss).of(xv);
  return value;
}

inline GradCheck check_op(const Builder& op, const Tensor& x, std::uint64_t seed) {
  Tensor analytic;
  weighted_output(op, x, seed, &analytic);
  const Tensor numeric = finite_difference(
      [&](const Tensor& p) { return weighted_output(op, p, seed, nullptr); }, x);
  return compare_gradients(analytic, numeric);
}

inline Tensor away_from(const Tensor& x, double kink, double gap) {
  Tensor y = x;
  for (double& v : y.values()) {
    if (std::abs(v - kink) < gap) v = kink + (v < kink ? -gap : gap);
  }
  return y;
}

inline SuiteResult primitive_suite(std::size_t seeds) {
  const auto start = std::chrono::steady_clock::now();
  SuiteResult out;
  auto run = [&](const char* name, const Builder& op, const Tensor& x, std::uint64_t seed) {
    const GradCheck r = check_op(op, x, seed);
    out.checks += x.size();
    if (!r.ok) out.failures.push_back(std::string(name) + " seed " + std::to_string(seed) + ": " + r.message);
  };
  for (std::uint64_t seed = 0; seed < seeds; ++seed) {
    const Tensor x = random_tensor(Shape{6, 5, 3}, seed, -2.0, 2.0);
    const Tensor other = random_tensor(Shape{6, 5, 3}, seed + 77, -2.0, 2.0);
    const std::vector<std::pair<const char*, Builder>> smooth = {
        {"add", [&](const ad::Var& v) { return ad::add(v, v.tape().constant(other)); }},
        {"sub", [&](const ad::Var& v) { return ad::sub(v.tape().constant(other), v); }},
        {"mul", [&](const ad::Var& v) { return ad::mul(v, v.tape().constant(other)); }},
        {"square", [&](const ad::Var& v) { return ad::mul(v, v); }},
        {"scale", [&](const ad::Var& v) { return ad::scale(v, -1.7); }},
        {"add_scalar", [&](const ad::Var& v) { return ad::add_scalar(v, 0.3); }},
        {"sigmoid", [&](const ad::Var& v) { return ad::sigmoid(v); }},
        {"softmax", [&](const ad::Var& v) { return ad::channel_softmax(v); }},
        {"channel_sum", [&](const ad::Var& v) {
           const std::size_t ch[] = {0, 2};
           return ad::channel_sum(v, ch);
         }},
        {"broadcast", [&](const ad::Var& v) {
           const std::size_t ch[] = {1};
           return ad::broadcast_channels(ad::channel_sum(v, ch), 4);
         }},
        {"resize_up", [&](const ad::Var& v) { return ad::resize_bilinear(v, 1.5); }},
        {"resize_down", [&](const ad::Var& v) { return ad::resize_bilinear(v, 0.75); }},
        {"resize_to", [&](const ad::Var& v) { return ad::resize_bilinear_to(v, 4, 9); }},
        {"fft_re", [&](const ad::Var& v) { return ad::fft2(v).re; }},
        {"fft_im", [&](const ad::Var& v) { return ad::fft2(v).im; }},
        {"ifft_real", [&](const ad::Var& v) {
           return ad::ifft2_real(ad::CVar{v, v.tape().constant(other)});
         }},
        {"ifft_real_im", [&](const ad::Var& v) {
           return ad::ifft2_real(ad::CVar{v.tape().constant(other), v});
         }},
        {"msd", [&](const ad::Var& v) { return ad::mean_squared_distance(v, other); }},
        {"mean", [&](const ad::Var& v) { return ad::mean(v); }},
        {"sum", [&](const ad::Var& v) { return ad::sum(v); }},
    };
    for (const auto& [name, op] : smooth) run(name, op, x, seed);

    // Kinked primitives are probed away from their kinks.
    run("log_stable", [](const ad::Var& v) { return ad::log_stable(v); },
        random_tensor(Shape{6, 5, 3}, seed + 5, 0.2, 2.0), seed);
    run("relu", [](const ad::Var& v) { return ad::relu(v); }, away_from(x, 0.0, 0.01), seed);
    run("clamp", [](const ad::Var& v) { return ad::clamp(v, -0.5, 0.5); },
        away_from(away_from(x, -0.5, 0.01), 0.5, 0.01), seed);
    const Tensor lo = random_tensor(x.shape(), seed + 9, -1.5, -0.5);
    const Tensor hi = random_tensor(x.shape(), seed + 10, 0.5, 1.5);
    Tensor xb = x;
    for (std::size_t i = 0; i < xb.size(); ++i) {
      if (std::abs(xb[i] - lo[i]) < 0.01 || std::abs(xb[i] - hi[i]) < 0.01) xb[i] = 0.0;
    }
    run("clamp_box", [&](const ad::Var& v) { return ad::clamp(v, lo, hi); }, xb, seed);

    Mask m(6, 5);
    for (std::size_t i = 0; i < 30; ++i) m.set(i / 5, i % 5, (i * 7 + seed) % 3 != 0);
    run("mean_masked", [&](const ad::Var& v) { return ad::mean_masked(v, m); }, x, seed);

    std::vector<std::uint8_t> labels(30);
    for (std::size_t i = 0; i < 30; ++i) labels[i] = static_cast<std::uint8_t>((i + seed) % 3);
    run("cross_entropy", [&](const ad::Var& v) { return ad::softmax_cross_entropy(v, labels); }, x, seed);

    const Tensor cx = random_tensor(Shape{6, 6, 2}, seed, -1.0, 1.0);
    const Tensor cw = random_tensor(Shape{9, 2, 3}, seed + 1000, -1.0, 1.0);
    const Tensor cb = random_tensor(Shape{1, 1, 3}, seed + 2000, -1.0, 1.0);
    const ad::ConvGeometry g{3, 3, seed % 2 == 0 ? 1u : 2u, 1};
    run("conv2d_x", [&](const ad::Var& v) {
      return ad::conv2d(v, v.tape().constant(cw), v.tape().constant(cb), g);
    }, cx, seed);
    run("conv2d_w", [&](const ad::Var& v) {
      return ad::conv2d(v.tape().constant(cx), v, v.tape().constant(cb), g);
    }, cw, seed);
    run("conv2d_b", [&](const ad::Var& v) {
      return ad::conv2d(v.tape().constant(cx), v.tape().constant(cw), v, g);
    }, cb, seed);
    const Tensor w1 = random_tensor(Shape{1, 3, 2}, seed + 3000, -1.0, 1.0);
    run("conv2d_1x1", [&](const ad::Var& v) {
      return ad::conv2d(v, v.tape().constant(w1), v.tape().constant(Tensor(Shape{1, 1, 2})),
                        ad::ConvGeometry{1, 1, 1, 0});
    }, x, seed);
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

inline Mask random_mask(std::size_t h, std::size_t w, std::uint64_t seed, double p = 0.4) {
  const Tensor r = random_tensor(Shape{h, w, 1}, seed);
  Mask m(h, w);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) m.set(y, x, r.at(y, x) < p);
  }
  m.set(h / 2, w / 2, true);
  return m;
}

// Full objective (perceptual minus multiscale segmentation) as a function of
// one of delta.re (slot 0), delta.im (slot 1) or the attention logits
// (slot 2), the other two held constant.
struct ObjectiveProbe {
  Tensor clean;
  Mask mask;
  const PixelClassifier* model = nullptr;
  const FeatureExtractor* features = nullptr;
  LossConfig cfg;
  Eq7Mode mode = Eq7Mode::kCanonical;
  std::vector<Tensor> taps;
  BudgetBox box;

  double eval(const PerturbationState& s, int slot, const Tensor* probe, Tensor* grad) const {
    ad::Tape t;
    auto make = [&](int k, const Tensor& v) {
      const Tensor& value = (slot == k && probe != nullptr) ? *probe : v;
      return slot == k && grad != nullptr ? t.variable(value) : t.constant(value);
    };
    const ad::CVar delta{make(0, s.delta.re), make(1, s.delta.im)};
    const ad::Var logits = make(2, s.logits);
    const ad::Var xp = render_frequency(clean, box, delta, &logits, mode);
    const LossGraph g = build_total_loss(xp, taps, mask, TargetModels{model, features}, cfg);
    const double v = g.total.value().item();
    if (grad != nullptr) {
      const ad::Gradients gr = t.backward(g.total);
      *grad = gr.of(slot == 0 ? delta.re : slot == 1 ? delta.im : logits);
    }
    return v;
  }
};

inline SuiteResult full_objective_suite(std::size_t seeds) {
  const auto start = std::chrono::steady_clock::now();
  SuiteResult out;
  const FeatureExtractor fx;
  for (std::uint64_t seed = 0; seed < seeds; ++seed) {
    const SegModel model = SegModel::initialize(500 + seed);
    const Shape s{16, 16, 3};
    ObjectiveProbe p;
    p.clean = random_tensor(s, 600 + seed, 0.2, 0.8);
    p.mask = random_mask(16, 16, 700 + seed);
    p.model = &model;
    p.features = &fx;
    p.mode = seed % 5 == 4 ? Eq7Mode::kLiteral : Eq7Mode::kCanonical;
    p.taps = fx.extract(p.clean);
    p.box = budget_box(p.clean, 0.05);
    // Spectral amplitude giving pixel perturbations of ~0.02, mostly inside
    // the box, so the objective depends on every coefficient.
    const double amp = 0.02 * 16.0;
    PerturbationState st{ComplexSpectrum(random_tensor(s, 800 + seed, -amp, amp),
                                         random_tensor(s, 900 + seed, -amp, amp)),
                         random_tensor(Shape{16, 16, 1}, 1000 + seed, -2.0, 2.0), 0};
    // The literal form adds the gated frame itself; small gates keep it
    // inside the box.
    if (p.mode == Eq7Mode::kLiteral) {
      for (double& v : st.logits.values()) v -= 6.0;
    }
    for (int slot = 0; slot < 3; ++slot) {
      Tensor analytic;
      p.eval(st, slot, nullptr, &analytic);
      const Tensor& base = slot == 0 ? st.delta.re : slot == 1 ? st.delta.im : st.logits;
      const Tensor numeric =
          finite_difference([&](const Tensor& probe) { return p.eval(st, slot, &probe, nullptr); }, base);
      const GradCheck r = compare_gradients(analytic, numeric);
      out.checks += base.size();
      if (!r.ok) {
        out.failures.push_back("objective seed " + std::to_string(seed) + " slot " + std::to_string(slot) +
                               ": " + r.message);
      }
    }
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace vdf::testing
