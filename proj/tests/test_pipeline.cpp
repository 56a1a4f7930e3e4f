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

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "vdf/error.hpp"
#include "vdf/metrics.hpp"
#include "vdf/pipeline.hpp"

using namespace vdf;
using vdf::testing::random_tensor;

namespace {

Mask centre_mask(std::size_t h, std::size_t w) {
  Mask m(h, w);
  for (std::size_t y = h / 4; y < 3 * h / 4; ++y) {
    for (std::size_t x = w / 4; x < 3 * w / 4; ++x) m.set(y, x, true);
  }
  return m;
}

PerturbationState some_state(const Shape& s, std::uint64_t seed) {
  return PerturbationState{ComplexSpectrum(random_tensor(s, seed, -1, 1), random_tensor(s, seed + 1, -1, 1)),
                           random_tensor(Shape{s.h, s.w, 1}, seed + 2, -2, 2), 0};
}

// Throws when asked to classify a bright frame.
class BrightnessTrap final : public PixelClassifier {
 public:
  std::size_t classes() const override { return 2; }
  ad::Var probabilities(const ad::Var& x) const override {
    double mean = 0.0;
    for (double v : x.value().values()) mean += v;
    if (mean / x.value().size() > 0.7) throw NumericError("trap");
    return inner_.probabilities(x);
  }

 private:
  ConstantClassifier inner_{{0.2, 0.8}};
};

}  // namespace

TEST_CASE("8-bit quantisation rounds half up and clamps") {
  Tensor x(Shape{1, 6, 1});
  x[0] = 10.0 / 255.0;
  x[1] = 10.5 / 255.0;
  x[2] = 10.49 / 255.0;
  x[3] = -0.2;
  x[4] = 1.3;
  x[5] = 254.5 / 255.0;
  const Tensor q = quantize_8bit(x);
  CHECK(q[0] == 10.0 / 255.0);
  CHECK(q[1] == 11.0 / 255.0);
  CHECK(q[2] == 10.0 / 255.0);
  CHECK(q[3] == 0.0);
  CHECK(q[4] == 1.0);
  CHECK(q[5] == 1.0);
  CHECK(quantize_8bit(q) == q);
}

TEST_CASE("random spectrum is seeded by seed and frame") {
  const Shape s{32, 32, 3};
  const ComplexSpectrum a = random_spectrum(s, 0.2, 9, 3);
  CHECK(a.re == random_spectrum(s, 0.2, 9, 3).re);
  CHECK(a.re != random_spectrum(s, 0.2, 9, 4).re);
  CHECK(a.re != random_spectrum(s, 0.2, 10, 3).re);
  const ComplexSpectrum z = random_spectrum(s, 0.0, 9, 3);
  for (double v : z.re.values()) CHECK(v == 0.0);
  double ss = 0.0;
  for (double v : a.re.values()) ss += v * v;
  for (double v : a.im.values()) ss += v * v;
  CHECK(std::sqrt(ss / (2.0 * s.size())) == doctest::Approx(0.2).epsilon(0.05));
  CHECK_THROWS_AS(random_spectrum(s, -1.0, 1, 1), DomainError);
}

TEST_CASE("warm start scales the previous perturbation by ssim") {
  const Shape s{24, 24, 3};
  const Mask m = centre_mask(24, 24);
  const PerturbationState prev = some_state(s, 1);
  const Tensor a = random_tensor(s, 10), b = random_tensor(s, 11);
  AttackConfig cfg;
  cfg.sigma_random = 0.0;

  const PerturbationState same = init_next_state(prev, a, a, m, cfg, 1);
  CHECK(same.delta.re == prev.delta.re);
  CHECK(same.delta.im == prev.delta.im);
  CHECK(same.logits == prev.logits);
  CHECK(same.frame_index == 1);

  const double sim = ssim(b, a);
  const PerturbationState scaled = init_next_state(prev, b, a, m, cfg, 2);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(scaled.delta.re[i] == doctest::Approx(sim * prev.delta.re[i]).epsilon(1e-14));
    CHECK(scaled.delta.im[i] == doctest::Approx(sim * prev.delta.im[i]).epsilon(1e-14));
  }
  CHECK(scaled.logits == prev.logits);

  cfg.sigma_random = 0.1;
  const PerturbationState noisy = init_next_state(prev, b, a, m, cfg, 2);
  const ComplexSpectrum noise = random_spectrum(s, 0.1, cfg.noise_seed, 2);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(noisy.delta.re[i] == doctest::Approx(sim * prev.delta.re[i] + noise.re[i]).epsilon(1e-14));
  }
  CHECK(noisy.delta.re == init_next_state(prev, b, a, m, cfg, 2).delta.re);

  cfg.inherit = false;
  const PerturbationState fresh = init_next_state(prev, b, a, m, cfg, 2);
  const PerturbationState expect = fresh_state(s, m, cfg, 2);
  CHECK(fresh.delta.re == expect.delta.re);
  CHECK(fresh.logits == init_attention(m, 0.9, 0.1));
}

TEST_CASE("single-frame pipeline equals one attack on a fresh state") {
  const Mask m = centre_mask(16, 16);
  const Tensor x = random_tensor(Shape{16, 16, 3}, 20, 0.1, 0.9);
  const SegModel model = SegModel::initialize(21);
  const FeatureExtractor fx;
  AttackConfig cfg;
  cfg.max_iters = 10;
  const TargetModels tm{&model, &fx};
  const ProtectedVideo v = protect_video(FrameSequence{{x}, {m}}, tm, cfg);
  const AttackOutput ref = attack_frame(x, m, fresh_state(x.shape(), m, cfg, 0), tm, cfg);
  REQUIRE(v.frames.size() == 1);
  CHECK(v.frames[0] == quantize_8bit(ref.perturbed));
  CHECK(v.states[0].delta.re == ref.state.delta.re);
  CHECK(v.report.frames[0].attack.iterations_used == ref.result.iterations_used);
  CHECK_FALSE(v.report.frames[0].ssim_to_previous.has_value());
  CHECK_FALSE(v.report.frames[0].inherited);
}

TEST_CASE("pipeline chains states, reports consistently and respects the budget") {
  const std::size_t n = 4;
  FrameSequence seq;
  for (std::size_t i = 0; i < n; ++i) {
    Tensor f = random_tensor(Shape{16, 16, 3}, 30, 0.1, 0.9);
    f += random_tensor(f.shape(), 40 + i, -0.02, 0.02);
    seq.frames.push_back(f);
    seq.masks.push_back(centre_mask(16, 16));
  }
  const SegModel model = SegModel::initialize(22);
  const FeatureExtractor fx;
  AttackConfig cfg;
  cfg.max_iters = 5;
  std::vector<std::size_t> seen;
  const ProtectedVideo v =
      protect_video(seq, TargetModels{&model, &fx}, cfg, [&](const FrameEntry& e) { seen.push_back(e.index); });
  CHECK(seen == std::vector<std::size_t>{0, 1, 2, 3});
  double iters = 0, p = 0, s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const FrameEntry& e = v.report.frames[i];
    CHECK(e.psnr == doctest::Approx(psnr(v.frames[i], seq.frames[i])));
    CHECK(e.ssim == doctest::Approx(ssim(v.frames[i], seq.frames[i])));
    CHECK(e.max_deviation <= cfg.radius + 0.5 / 255.0 + 1e-12);
    CHECK(quantize_8bit(v.frames[i]) == v.frames[i]);
    if (i > 0) {
      CHECK(e.inherited);
      CHECK(*e.ssim_to_previous == doctest::Approx(ssim(seq.frames[i], seq.frames[i - 1])));
    }
    iters += e.attack.iterations_used;
    p += e.psnr;
    s += e.ssim;
  }
  CHECK(v.report.mean_iterations == doctest::Approx(iters / n));
  CHECK(v.report.mean_psnr == doctest::Approx(p / n));
  CHECK(v.report.mean_ssim == doctest::Approx(s / n));
  // Frame 2 starts where frame 1 ended.
  const PerturbationState init2 =
      init_next_state(v.states[1], seq.frames[2], seq.frames[1], seq.masks[2], cfg, 2);
  const AttackOutput again = attack_frame(seq.frames[2], seq.masks[2], init2, TargetModels{&model, &fx}, cfg);
  CHECK(again.state.delta.re == v.states[2].delta.re);
}

TEST_CASE("per-frame failures carry the frame index") {
  FrameSequence seq;
  for (double level : {0.3, 0.4, 0.9}) {
    Tensor f(Shape{16, 16, 3});
    for (double& v : f.values()) v = level;
    seq.frames.push_back(f);
    seq.masks.push_back(centre_mask(16, 16));
  }
  const BrightnessTrap trap;
  AttackConfig cfg;
  cfg.max_iters = 2;
  cfg.loss.perceptual_on = false;
  try {
    protect_video(seq, TargetModels{&trap, nullptr}, cfg);
    FAIL("expected FrameError");
  } catch (const FrameError& e) {
    CHECK(e.frame() == 2);
    CHECK(std::string(e.what()).find("frame 2: ") == 0);
  }
  FrameSequence bad = seq;
  bad.masks.pop_back();
  CHECK_THROWS_AS(protect_video(bad, TargetModels{&trap, nullptr}, cfg), ShapeError);
  CHECK_THROWS_AS(protect_video(FrameSequence{}, TargetModels{&trap, nullptr}, cfg), DomainError);
}
