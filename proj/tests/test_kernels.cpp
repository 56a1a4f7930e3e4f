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
#include "vdf/autodiff.hpp"
#include "vdf/kernels.hpp"

using namespace vdf;
using vdf::testing::random_tensor;

namespace {

// Restores the active table after a test pins one.
struct TableGuard {
  std::string saved = kernels::active().name;
  ~TableGuard() { kernels::select(saved); }
};

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  const Tensor t = random_tensor(Shape{n, 1, 1}, seed, -1.0, 1.0);
  return {t.values().begin(), t.values().end()};
}

}  // namespace

TEST_CASE("scalar table is always available and listed first") {
  const auto tables = kernels::available_tables();
  REQUIRE(!tables.empty());
  CHECK(std::string(tables.front()->name) == "scalar");
  CHECK(kernels::select("scalar"));
  CHECK_FALSE(kernels::select("no-such-isa"));
}

TEST_CASE("SIMD variants agree with the scalar reference") {
  const auto& ref = kernels::scalar_table();
  for (const kernels::KernelTable* t : kernels::available_tables()) {
    CAPTURE(t->name);
    // Sizes straddle the 16/8/4 blocking and the two-row pairing.
    for (std::size_t m : {1u, 2u, 3u, 17u}) {
      for (std::size_t k : {1u, 3u, 16u}) {
        for (std::size_t n : {1u, 2u, 4u, 7u, 16u, 19u, 64u}) {
          const std::size_t lda = k + 3, ldc = n + 2, ldg = n + 1;
          const auto a = random_vec(m * lda, m * 100 + k);
          const auto b = random_vec(k * n, k * 10 + n);
          auto c_ref = random_vec(m * ldc, n);
          auto c_simd = c_ref;
          ref.gemm_nn(a.data(), lda, b.data(), c_ref.data(), ldc, m, k, n);
          t->gemm_nn(a.data(), lda, b.data(), c_simd.data(), ldc, m, k, n);
          for (std::size_t i = 0; i < c_ref.size(); ++i) {
            CHECK(std::abs(c_ref[i] - c_simd[i]) <= 1e-12 * (1.0 + std::abs(c_ref[i])));
          }

          const auto g = random_vec(m * ldg, m + n);
          auto w_ref = random_vec(k * n, 7);
          auto w_simd = w_ref;
          ref.gemm_tn(a.data(), lda, g.data(), ldg, w_ref.data(), m, k, n);
          t->gemm_tn(a.data(), lda, g.data(), ldg, w_simd.data(), m, k, n);
          for (std::size_t i = 0; i < w_ref.size(); ++i) {
            CHECK(std::abs(w_ref[i] - w_simd[i]) <= 1e-12 * (1.0 + std::abs(w_ref[i])));
          }
        }
      }
    }
    for (std::size_t n : {0u, 1u, 7u, 8u, 100u}) {
      const auto a = random_vec(n + 1, 1), b = random_vec(n + 1, 2);
      const double r = ref.squared_distance(a.data(), b.data(), n);
      CHECK(t->squared_distance(a.data(), b.data(), n) == doctest::Approx(r).epsilon(1e-13));
    }
  }
}

TEST_CASE("conv2d forward and backward agree across kernel tables") {
  TableGuard guard;
  const Tensor x = random_tensor(Shape{13, 11, 3}, 1, -1.0, 1.0);
  const Tensor w = random_tensor(Shape{9, 3, 16}, 2, -1.0, 1.0);
  const Tensor b = random_tensor(Shape{1, 1, 16}, 3, -1.0, 1.0);
  auto run = [&](const char* name) {
    REQUIRE(kernels::select(name));
    ad::Tape t;
    ad::Var xv = t.variable(x);
    ad::Var wv = t.variable(w);
    ad::Var y = ad::conv2d(xv, wv, t.constant(b), ad::ConvGeometry{3, 3, 2, 1});
    ad::Var loss = ad::sum(ad::mul(y, y));
    const double value = loss.value().item();
    auto g = t.backward(loss);
    return std::tuple{value, g.of(xv), g.of(wv)};
  };
  const auto [v0, gx0, gw0] = run("scalar");
  for (const kernels::KernelTable* table : kernels::available_tables()) {
    const auto [v1, gx1, gw1] = run(table->name);
    CHECK(v1 == doctest::Approx(v0).epsilon(1e-12));
    CHECK(max_abs_diff(gx0, gx1) <= 1e-10);
    CHECK(max_abs_diff(gw0, gw1) <= 1e-10);
  }
}
