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

// Data-parallel inner loops of the pipeline, in a portable scalar reference
// version and an AVX2 version selected at run time.
//
// The element-wise kernels (central_differences, iir_filter) perform the
// same floating-point operations in the same order in every backend, and the
// kernel sources are compiled with -ffp-contract=off, so all backends return
// bit-identical results. sum_norm3_diff is a reduction; its summation order
// differs between backends.
//
// The active backend defaults to the best one the CPU supports. Setting the
// environment variable IDYN_SIMD=scalar forces the reference kernels.

#ifndef IDYN_SIMD_KERNELS_HPP_
#define IDYN_SIMD_KERNELS_HPP_

#include <cstddef>
#include <string_view>
#include <vector>

namespace idyn::simd {

enum class Backend { kScalar, kAvx2 };

struct KernelTable {
  // x is [frames][width] row-major. For 1 <= t <= frames - 2 writes
  //   vel[t] = (x[t+1] - x[t-1]) * (0.5 / dt)
  //   acc[t] = (x[t+1] - 2 x[t] + x[t-1]) * (1 / dt^2)
  // Rows 0 and frames - 1 of vel/acc are left untouched. frames >= 3.
  void (*central_differences)(const double* x, std::size_t frames,
                              std::size_t width, double dt, double* vel,
                              double* acc);

  // In-place 4th-order IIR (transposed direct form II, a[0] == 1) along the
  // time axis of data, laid out [frames][channels]. The filter state of
  // channel c starts at zi * data[0][c].
  void (*iir_filter)(const double* b, const double* a, const double* zi,
                     double* data, std::size_t frames, std::size_t channels);

  // Sum over k < count of |lhs[3k..3k+2] - rhs[3k..3k+2]|.
  double (*sum_norm3_diff)(const double* lhs, const double* rhs,
                           std::size_t count);
};

inline constexpr std::size_t kIirOrder = 4;

std::string_view backend_name(Backend b);
bool backend_available(Backend b);
std::vector<Backend> available_backends();

// Kernels of a specific backend. Throws InvalidInput if unavailable.
const KernelTable& kernels(Backend b);
// Kernels of the active backend.
const KernelTable& kernels();

Backend active_backend();
// Throws InvalidInput if the backend is not available on this CPU.
void set_active_backend(Backend b);

namespace detail {
const KernelTable& scalar_kernels();
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_kernels();
#endif
}  // namespace detail

}  // namespace idyn::simd

#endif  // IDYN_SIMD_KERNELS_HPP_
