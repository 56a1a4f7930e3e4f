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

// Compiled with -mavx2 -mfma. Nothing in here may run before the dispatcher
// has confirmed CPU support.

#include <immintrin.h>

#include "vdf/kernels.hpp"

namespace vdf::kernels {
namespace {

inline void nn_row_tail(const double* ai, const double* b, double* ci, std::size_t k, std::size_t n,
                        std::size_t j0) {
  std::size_t j = j0;
  for (; j + 4 <= n; j += 4) {
    __m256d acc = _mm256_loadu_pd(ci + j);
    for (std::size_t p = 0; p < k; ++p) {
      acc = _mm256_fmadd_pd(_mm256_set1_pd(ai[p]), _mm256_loadu_pd(b + p * n + j), acc);
    }
    _mm256_storeu_pd(ci + j, acc);
  }
  for (; j < n; ++j) {
    double acc = ci[j];
    for (std::size_t p = 0; p < k; ++p) acc += ai[p] * b[p * n + j];
    ci[j] = acc;
  }
}

void gemm_nn_avx2(const double* a, std::size_t lda, const double* b, double* c, std::size_t ldc,
                  std::size_t m, std::size_t k, std::size_t n) {
  const std::size_t n16 = n - n % 16;
  std::size_t i = 0;
  // Two rows share every B load.
  for (; i + 2 <= m; i += 2) {
    const double* a0 = a + i * lda;
    const double* a1 = a0 + lda;
    double* c0 = c + i * ldc;
    double* c1 = c0 + ldc;
    for (std::size_t j = 0; j < n16; j += 16) {
      __m256d x0 = _mm256_loadu_pd(c0 + j), x1 = _mm256_loadu_pd(c0 + j + 4);
      __m256d x2 = _mm256_loadu_pd(c0 + j + 8), x3 = _mm256_loadu_pd(c0 + j + 12);
      __m256d y0 = _mm256_loadu_pd(c1 + j), y1 = _mm256_loadu_pd(c1 + j + 4);
      __m256d y2 = _mm256_loadu_pd(c1 + j + 8), y3 = _mm256_loadu_pd(c1 + j + 12);
      for (std::size_t p = 0; p < k; ++p) {
        const double* bp = b + p * n + j;
        const __m256d b0 = _mm256_loadu_pd(bp), b1 = _mm256_loadu_pd(bp + 4);
        const __m256d b2 = _mm256_loadu_pd(bp + 8), b3 = _mm256_loadu_pd(bp + 12);
        const __m256d s0 = _mm256_set1_pd(a0[p]);
        const __m256d s1 = _mm256_set1_pd(a1[p]);
        x0 = _mm256_fmadd_pd(s0, b0, x0);
        x1 = _mm256_fmadd_pd(s0, b1, x1);
        x2 = _mm256_fmadd_pd(s0, b2, x2);
        x3 = _mm256_fmadd_pd(s0, b3, x3);
        y0 = _mm256_fmadd_pd(s1, b0, y0);
        y1 = _mm256_fmadd_pd(s1, b1, y1);
        y2 = _mm256_fmadd_pd(s1, b2, y2);
        y3 = _mm256_fmadd_pd(s1, b3, y3);
      }
      _mm256_storeu_pd(c0 + j, x0);
      _mm256_storeu_pd(c0 + j + 4, x1);
      _mm256_storeu_pd(c0 + j + 8, x2);
      _mm256_storeu_pd(c0 + j + 12, x3);
      _mm256_storeu_pd(c1 + j, y0);
      _mm256_storeu_pd(c1 + j + 4, y1);
      _mm256_storeu_pd(c1 + j + 8, y2);
      _mm256_storeu_pd(c1 + j + 12, y3);
    }
    if (n16 < n) {
      nn_row_tail(a0, b, c0, k, n, n16);
      nn_row_tail(a1, b, c1, k, n, n16);
    }
  }
  for (; i < m; ++i) {
    const double* ai = a + i * lda;
    double* ci = c + i * ldc;
    for (std::size_t j = 0; j < n16; j += 16) {
      __m256d x0 = _mm256_loadu_pd(ci + j), x1 = _mm256_loadu_pd(ci + j + 4);
      __m256d x2 = _mm256_loadu_pd(ci + j + 8), x3 = _mm256_loadu_pd(ci + j + 12);
      for (std::size_t p = 0; p < k; ++p) {
        const double* bp = b + p * n + j;
        const __m256d s = _mm256_set1_pd(ai[p]);
        x0 = _mm256_fmadd_pd(s, _mm256_loadu_pd(bp), x0);
        x1 = _mm256_fmadd_pd(s, _mm256_loadu_pd(bp + 4), x1);
        x2 = _mm256_fmadd_pd(s, _mm256_loadu_pd(bp + 8), x2);
        x3 = _mm256_fmadd_pd(s, _mm256_loadu_pd(bp + 12), x3);
      }
      _mm256_storeu_pd(ci + j, x0);
      _mm256_storeu_pd(ci + j + 4, x1);
      _mm256_storeu_pd(ci + j + 8, x2);
      _mm256_storeu_pd(ci + j + 12, x3);
    }
    if (n16 < n) nn_row_tail(ai, b, ci, k, n, n16);
  }
}

void gemm_tn_avx2(const double* a, std::size_t lda, const double* g, std::size_t ldg, double* c,
                  std::size_t m, std::size_t k, std::size_t n) {
  const std::size_t n8 = n - n % 8;
  std::size_t p = 0;
  // Two output rows share every G load.
  for (; p + 2 <= k; p += 2) {
    double* c0 = c + p * n;
    double* c1 = c0 + n;
    for (std::size_t j = 0; j < n8; j += 8) {
      __m256d x0 = _mm256_loadu_pd(c0 + j), x1 = _mm256_loadu_pd(c0 + j + 4);
      __m256d y0 = _mm256_loadu_pd(c1 + j), y1 = _mm256_loadu_pd(c1 + j + 4);
      for (std::size_t i = 0; i < m; ++i) {
        const double* gi = g + i * ldg + j;
        const __m256d g0 = _mm256_loadu_pd(gi), g1 = _mm256_loadu_pd(gi + 4);
        const __m256d s0 = _mm256_set1_pd(a[i * lda + p]);
        const __m256d s1 = _mm256_set1_pd(a[i * lda + p + 1]);
        x0 = _mm256_fmadd_pd(s0, g0, x0);
        x1 = _mm256_fmadd_pd(s0, g1, x1);
        y0 = _mm256_fmadd_pd(s1, g0, y0);
        y1 = _mm256_fmadd_pd(s1, g1, y1);
      }
      _mm256_storeu_pd(c0 + j, x0);
      _mm256_storeu_pd(c0 + j + 4, x1);
      _mm256_storeu_pd(c1 + j, y0);
      _mm256_storeu_pd(c1 + j + 4, y1);
    }
    for (std::size_t j = n8; j < n; ++j) {
      double s0 = c0[j], s1 = c1[j];
      for (std::size_t i = 0; i < m; ++i) {
        const double gv = g[i * ldg + j];
        s0 += a[i * lda + p] * gv;
        s1 += a[i * lda + p + 1] * gv;
      }
      c0[j] = s0;
      c1[j] = s1;
    }
  }
  for (; p < k; ++p) {
    double* cp = c + p * n;
    for (std::size_t j = 0; j < n8; j += 8) {
      __m256d x0 = _mm256_loadu_pd(cp + j), x1 = _mm256_loadu_pd(cp + j + 4);
      for (std::size_t i = 0; i < m; ++i) {
        const double* gi = g + i * ldg + j;
        const __m256d s = _mm256_set1_pd(a[i * lda + p]);
        x0 = _mm256_fmadd_pd(s, _mm256_loadu_pd(gi), x0);
        x1 = _mm256_fmadd_pd(s, _mm256_loadu_pd(gi + 4), x1);
      }
      _mm256_storeu_pd(cp + j, x0);
      _mm256_storeu_pd(cp + j + 4, x1);
    }
    for (std::size_t j = n8; j < n; ++j) {
      double s = cp[j];
      for (std::size_t i = 0; i < m; ++i) s += a[i * lda + p] * g[i * ldg + j];
      cp[j] = s;
    }
  }
}

double squared_distance_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    acc1 = _mm256_fmadd_pd(d1, d1, acc1);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

constexpr KernelTable kAvx2{"avx2", gemm_nn_avx2, gemm_tn_avx2, squared_distance_avx2};

}  // namespace

const KernelTable* avx2_table_unchecked() { return &kAvx2; }

}  // namespace vdf::kernels
