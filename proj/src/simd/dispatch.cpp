// Copyright 2026 The idyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <atomic>
#include <cstdlib>
#include <string>

#include "idyn/error.hpp"
#include "idyn/simd/kernels.hpp"

namespace idyn::simd {
namespace {

bool cpu_has_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend initial_backend() {
  const char* env = std::getenv("IDYN_SIMD");
  if (env != nullptr && std::string(env) == "scalar") return Backend::kScalar;
  return cpu_has_avx2() ? Backend::kAvx2 : Backend::kScalar;
}

std::atomic<Backend>& active() {
  static std::atomic<Backend> backend{initial_backend()};
  return backend;
}

}  // namespace

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
  }
  return "unknown";
}

bool backend_available(Backend b) {
  return b == Backend::kScalar || (b == Backend::kAvx2 && cpu_has_avx2());
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out{Backend::kScalar};
  if (backend_available(Backend::kAvx2)) out.push_back(Backend::kAvx2);
  return out;
}

const KernelTable& kernels(Backend b) {
  if (!backend_available(b)) {
    throw InvalidInput("SIMD backend '" + std::string(backend_name(b)) +
                       "' is not available on this CPU");
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (b == Backend::kAvx2) return detail::avx2_kernels();
#endif
  return detail::scalar_kernels();
}

const KernelTable& kernels() { return kernels(active_backend()); }

Backend active_backend() { return active().load(std::memory_order_relaxed); }

void set_active_backend(Backend b) {
  if (!backend_available(b)) {
    throw InvalidInput("SIMD backend '" + std::string(backend_name(b)) +
                       "' is not available on this CPU");
  }
  active().store(b, std::memory_order_relaxed);
}

}  // namespace idyn::simd
