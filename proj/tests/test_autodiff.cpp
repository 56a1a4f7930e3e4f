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
#include <functional>

#include "doctest.h"
#include "gradient_suite.hpp"
#include "oracles.hpp"
#include "vdf/autodiff.hpp"
#include "vdf/error.hpp"

using namespace vdf;
using vdf::testing::random_tensor;

using vdf::testing::check_op;

TEST_CASE("elementwise closed forms") {
  ad::Tape t;
  ad::Var x = t.variable(Tensor(Shape{1, 2, 1}, std::vector<double>{-1.0, 2.0}));
  ad::Var r = ad::relu(x);
  CHECK(r.value()[0] == 0.0);
  CHECK(r.value()[1] == 2.0);
  const Tensor g = t.backward(ad::sum(r)).of(x);
  CHECK(g[0] == 0.0);
  CHECK(g[1] == 1.0);

  ad::Tape t2;
  ad::Var z = t2.variable(Tensor::scalar(0.0));
  ad::Var s = ad::sigmoid(z);
  CHECK(s.value().item() == 0.5);
  CHECK(t2.backward(s).of(z).item() == 0.25);

  ad::Tape t3;
  ad::Var tiny = t3.constant(Tensor::scalar(1e-20));
  CHECK(ad::log_stable(tiny).value().item() == doctest::Approx(-27.631021115928547).epsilon(1e-12));

  ad::Tape t4;
  ad::Var zero = t4.variable(Tensor::scalar(0.0));
  CHECK(t4.backward(ad::relu(zero)).of(zero).item() == 0.0);
}

TEST_CASE("clamp gradient passes only strictly inside") {
  ad::Tape t;
  ad::Var x = t.variable(Tensor(Shape{1, 4, 1}, std::vector<double>{-0.5, 0.0, 0.5, 2.0}));
  const Tensor g = t.backward(ad::sum(ad::clamp(x, 0.0, 1.0))).of(x);
  CHECK(g[0] == 0.0);
  CHECK(g[1] == 0.0);
  CHECK(g[2] == 1.0);
  CHECK(g[3] == 0.0);
}

TEST_CASE("channel_softmax values") {
  ad::Tape t;
  ad::Var eq = t.constant(Tensor(Shape{2, 2, 2}, 3.0));
  for (double v : ad::channel_softmax(eq).value().values()) CHECK(v == 0.5);
  ad::Var hot = t.constant(Tensor(Shape{1, 1, 2}, std::vector<double>{10.0, 0.0}));
  const Tensor p = ad::channel_softmax(hot).value();
  CHECK(p[0] == doctest::Approx(0.9999546021312976).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(4.5397868702434395e-05).epsilon(1e-10));

  ad::Var rnd = t.constant(random_tensor(Shape{5, 5, 4}, 3, -20.0, 20.0));
  const Tensor q = ad::channel_softmax(rnd).value();
  for (std::size_t px = 0; px < 25; ++px) {
    double s = 0.0;
    for (std::size_t c = 0; c < 4; ++c) s += q[px * 4 + c];
    CHECK(std::abs(s - 1.0) <= 1e-12);
  }
  CHECK_THROWS_AS(ad::channel_softmax(t.constant(Tensor(Shape{2, 2, 1}))), ShapeError);
}

TEST_CASE("mean_masked") {
  ad::Tape t;
  Mask full(3, 3, true);
  CHECK(ad::mean_masked(t.constant(Tensor(Shape{3, 3, 2}, 0.4)), full).value().item() ==
        doctest::Approx(0.4));

  Tensor x(Shape{2, 2, 1}, std::vector<double>{1.0, 7.0, 9.0, 3.0});
  Mask two(2, 2);
  two.set(0, 0, true);
  two.set(1, 1, true);
  CHECK(ad::mean_masked(t.constant(x), two).value().item() == 2.0);

  const Tensor r = random_tensor(Shape{6, 5, 3}, 11);
  Mask m(6, 5);
  std::mt19937_64 rng(5);
  for (std::size_t y = 0; y < 6; ++y)
    for (std::size_t xx = 0; xx < 5; ++xx) m.set(y, xx, rng() % 2 == 0);
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t y = 0; y < 6; ++y)
    for (std::size_t xx = 0; xx < 5; ++xx)
      if (m(y, xx))
        for (std::size_t c = 0; c < 3; ++c) {
          acc += r.at(y, xx, c);
          ++n;
        }
  CHECK(ad::mean_masked(t.constant(r), m).value().item() == doctest::Approx(acc / n).epsilon(1e-14));
  CHECK_THROWS_AS(ad::mean_masked(t.constant(r), Mask(6, 5)), DomainError);
}

TEST_CASE("conv2d closed forms and errors") {
  ad::Tape t;
  const Tensor x = random_tensor(Shape{5, 4, 2}, 1);
  Tensor ident(Shape{1, 2, 2}, 0.0);
  ident[0] = 1.0;
  ident[3] = 1.0;
  const ad::ConvGeometry one{1, 1, 1, 0};
  ad::Var y = ad::conv2d(t.constant(x), t.constant(ident), t.constant(Tensor(Shape{1, 1, 2}, 0.0)), one);
  CHECK(max_abs_diff(y.value(), x) == 0.0);

  const double c = 0.3;
  ad::Var box = ad::conv2d(t.constant(Tensor(Shape{5, 5, 1}, c)), t.constant(Tensor(Shape{9, 1, 1}, 1.0)),
                           t.constant(Tensor(Shape{1, 1, 1}, 0.0)), ad::ConvGeometry{});
  CHECK(box.value().at(2, 2) == doctest::Approx(9.0 * c));
  CHECK(box.value().at(0, 0) == doctest::Approx(4.0 * c));

  ad::Var strided = ad::conv2d(t.constant(Tensor(Shape{7, 6, 1}, 1.0)),
                               t.constant(Tensor(Shape{9, 1, 3}, 1.0)),
                               t.constant(Tensor(Shape{1, 1, 3}, 0.0)), ad::ConvGeometry{3, 3, 2, 1});
  CHECK(strided.shape() == Shape{4, 3, 3});

  CHECK_THROWS_AS(ad::conv2d(t.constant(Tensor(Shape{4, 4, 3})), t.constant(Tensor(Shape{9, 2, 4})),
                             t.constant(Tensor(Shape{1, 1, 4})), ad::ConvGeometry{}),
                  ShapeError);
}

TEST_CASE("resize_bilinear closed forms") {
  ad::Tape t;
  const Tensor x = random_tensor(Shape{7, 5, 3}, 4);
  CHECK(max_abs_diff(ad::resize_bilinear(t.constant(x), 1.0).value(), x) == 0.0);

  ad::Var quad = ad::resize_bilinear(t.constant(Tensor(Shape{2, 2, 1}, std::vector<double>{0, 1, 2, 3})), 0.5);
  CHECK(quad.shape() == Shape{1, 1, 1});
  CHECK(quad.value().item() == doctest::Approx(1.5).epsilon(1e-15));

  for (double s : {2.0, 1.5, 0.75, 0.5}) {
    const Tensor r = ad::resize_bilinear(t.constant(Tensor(Shape{8, 8, 3}, 0.62)), s).value();
    CHECK(r.height() == static_cast<std::size_t>(std::lround(8 * s)));
    for (double v : r.values()) CHECK(v == doctest::Approx(0.62).epsilon(1e-14));
  }
  CHECK_THROWS_AS(ad::resize_bilinear(t.constant(Tensor(Shape{1, 1, 1})), 0.3), DomainError);
}

TEST_CASE("every differentiable primitive matches finite differences over 20 seeds") {
  const testing::SuiteResult r = testing::primitive_suite(20);
  for (const std::string& f : r.failures) FAIL_CHECK(f);
  CHECK(r.failures.empty());
  CHECK(r.checks > 0);
}

TEST_CASE("backward closed forms and tape discipline") {
  const Tensor x = random_tensor(Shape{3, 4, 2}, 8, -1.0, 1.0);
  {
    ad::Tape t;
    ad::Var v = t.variable(x);
    const Tensor g = t.backward(ad::sum(v)).of(v);
    for (double e : g.values()) CHECK(e == 1.0);
  }
  {
    ad::Tape t;
    ad::Var v = t.variable(x);
    const Tensor g = t.backward(ad::sum(ad::mul(v, v))).of(v);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(g[i] == 2.0 * x[i]);
  }
  {
    ad::Tape t;
    ad::Var v = t.variable(x);
    CHECK_THROWS_AS(t.backward(ad::relu(v)), TapeError);
  }
  {
    ad::Tape t;
    ad::Var v = t.variable(x);
    ad::Var s = ad::sum(v);
    t.backward(s);
    CHECK(t.consumed());
    CHECK_THROWS_AS(t.backward(s), TapeError);
    CHECK_THROWS_AS(ad::relu(v), TapeError);
  }
  {
    // Variables not reaching the output get zero gradients.
    ad::Tape t;
    ad::Var a = t.variable(x);
    ad::Var b = t.variable(x);
    const auto grads = t.backward(ad::sum(a));
    for (double e : grads.of(b).values()) CHECK(e == 0.0);
  }
}

TEST_CASE("tape determinism: identical inputs give bit-identical gradients") {
  auto run = [] {
    ad::Tape t;
    ad::Var v = t.variable(random_tensor(Shape{9, 9, 3}, 17, -1.0, 1.0));
    ad::Var w = t.constant(random_tensor(Shape{9, 3, 4}, 18, -1.0, 1.0));
    ad::Var b = t.constant(random_tensor(Shape{1, 1, 4}, 19, -1.0, 1.0));
    ad::Var y = ad::channel_softmax(ad::conv2d(ad::resize_bilinear(v, 1.5), w, b, ad::ConvGeometry{}));
    return t.backward(ad::sum(ad::log_stable(y))).of(v);
  };
  const Tensor a = run();
  const Tensor b = run();
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("precomputed_scalar injects an external gradient") {
  const Tensor x = random_tensor(Shape{4, 4, 1}, 3);
  const Tensor d = random_tensor(Shape{4, 4, 1}, 4);
  ad::Tape t;
  ad::Var v = t.variable(x);
  ad::Var s = ad::precomputed_scalar(v, 2.5, d);
  CHECK(s.value().item() == 2.5);
  const Tensor g = t.backward(ad::scale(s, 3.0)).of(v);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(g[i] == doctest::Approx(3.0 * d[i]));
}
