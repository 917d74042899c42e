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

#include <cmath>

#include "idyn/simd/kernels.hpp"

namespace idyn::simd::detail {
namespace {

void central_differences(const double* x, std::size_t frames,
                         std::size_t width, double dt, double* vel,
                         double* acc) {
  const double half_inv_dt = 0.5 / dt;
  const double inv_dt2 = 1.0 / (dt * dt);
  for (std::size_t t = 1; t + 1 < frames; ++t) {
    const double* prev = x + (t - 1) * width;
    const double* cur = x + t * width;
    const double* next = x + (t + 1) * width;
    double* v = vel + t * width;
    double* a = acc + t * width;
    for (std::size_t k = 0; k < width; ++k) {
      v[k] = (next[k] - prev[k]) * half_inv_dt;
      a[k] = ((next[k] - 2.0 * cur[k]) + prev[k]) * inv_dt2;
    }
  }
}

void iir_filter(const double* b, const double* a, const double* zi,
                double* data, std::size_t frames, std::size_t channels) {
  for (std::size_t c = 0; c < channels; ++c) {
    const double x0 = data[c];
    double z0 = zi[0] * x0, z1 = zi[1] * x0, z2 = zi[2] * x0, z3 = zi[3] * x0;
    for (std::size_t t = 0; t < frames; ++t) {
      double& s = data[t * channels + c];
      const double x = s;
      const double y = b[0] * x + z0;
      z0 = (b[1] * x - a[1] * y) + z1;
      z1 = (b[2] * x - a[2] * y) + z2;
      z2 = (b[3] * x - a[3] * y) + z3;
      z3 = b[4] * x - a[4] * y;
      s = y;
    }
  }
}

double sum_norm3_diff(const double* lhs, const double* rhs,
                      std::size_t count) {
  double sum = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double dx = lhs[3 * k] - rhs[3 * k];
    const double dy = lhs[3 * k + 1] - rhs[3 * k + 1];
    const double dz = lhs[3 * k + 2] - rhs[3 * k + 2];
    sum += std::sqrt(dx * dx + dy * dy + dz * dz);
  }
  return sum;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{&central_differences, &iir_filter,
                                 &sum_norm3_diff};
  return table;
}

}  // namespace idyn::simd::detail
