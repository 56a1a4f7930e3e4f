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

#include <atomic>
#include <cstdlib>
#include <string>

#include "vdf/kernels.hpp"

namespace vdf::kernels {

#if defined(VDF_HAVE_AVX2)
const KernelTable* avx2_table_unchecked();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(VDF_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* resolve_default() {
  const char* forced = std::getenv("VDF_KERNELS");
  if (forced != nullptr) {
    const std::string name(forced);
    if (name == "scalar") return &scalar_table();
    if (name == "avx2" && avx2_table() != nullptr) return avx2_table();
  }
  if (const KernelTable* t = avx2_table()) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

const KernelTable* avx2_table() {
#if defined(VDF_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

std::vector<const KernelTable*> available_tables() {
  std::vector<const KernelTable*> out{&scalar_table()};
  if (const KernelTable* t = avx2_table()) out.push_back(t);
  return out;
}

const KernelTable& active() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (t == nullptr) {
    const KernelTable* resolved = resolve_default();
    g_active.compare_exchange_strong(t, resolved, std::memory_order_acq_rel);
    t = g_active.load(std::memory_order_acquire);
  }
  return *t;
}

bool select(std::string_view name) {
  for (const KernelTable* t : available_tables()) {
    if (name == t->name) {
      g_active.store(t, std::memory_order_release);
      return true;
    }
  }
  return false;
}

}  // namespace vdf::kernels
