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

// Inner loops of the convolution forward and backward passes. Every kernel
// has a portable scalar reference; SIMD variants are compiled into separate
// translation units and chosen once at runtime from CPU features. The
// VDF_KERNELS environment variable ("scalar", "avx2") pins the choice.

#include <cstddef>
#include <string_view>
#include <vector>

namespace vdf::kernels {

// C[i*ldc + j] += sum_p A[i*lda + p] * B[p*n + j]   (i < m, p < k, j < n)
using GemmNN = void (*)(const double* a, std::size_t lda, const double* b, double* c,
                        std::size_t ldc, std::size_t m, std::size_t k, std::size_t n);

// C[p*n + j] += sum_i A[i*lda + p] * G[i*ldg + j]   (i < m, p < k, j < n)
using GemmTN = void (*)(const double* a, std::size_t lda, const double* g, std::size_t ldg,
                        double* c, std::size_t m, std::size_t k, std::size_t n);

// sum_i (a[i] - b[i])^2
using SquaredDistance = double (*)(const double* a, const double* b, std::size_t n);

struct KernelTable {
  const char* name;
  GemmNN gemm_nn;
  GemmTN gemm_tn;
  SquaredDistance squared_distance;
};

const KernelTable& scalar_table();

// nullptr when the variant was not compiled in or the CPU lacks the ISA.
const KernelTable* avx2_table();

// Tables usable on this machine, scalar first.
std::vector<const KernelTable*> available_tables();

// Table used by the library. Resolved on first call.
const KernelTable& active();

// Force a table by name; returns false if unavailable. Not thread-safe with
// concurrent kernel use.
bool select(std::string_view name);

}  // namespace vdf::kernels
