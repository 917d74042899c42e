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

// AVX2 kernels. This file is compiled with -mavx2 (no FMA) and is only
// called after a CPUID check. Lanes run the scalar recipe operation for
// operation; tails fall back to the scalar kernels.

#include <immintrin.h>

#include <cmath>

#include "idyn/simd/kernels.hpp"

namespace idyn::simd::detail {
namespace {

void central_differences(const double* x, std::size_t frames,
                         std::size_t width, double dt, double* vel,
                         double* acc) {
  const double half_inv_dt = 0.5 / dt;
  const double inv_dt2 = 1.0 / (dt * dt);
  const __m256d vh = _mm256_set1_pd(half_inv_dt);
  const __m256d vi = _mm256_set1_pd(inv_dt2);
  const __m256d two = _mm256_set1_pd(2.0);
  for (std::size_t t = 1; t + 1 < frames; ++t) {
    const double* prev = x + (t - 1) * width;
    const double* cur = x + t * width;
    const double* next = x + (t + 1) * width;
    double* v = vel + t * width;
    double* a = acc + t * width;
    std::size_t k = 0;
    for (; k + 4 <= width; k += 4) {
      const __m256d p = _mm256_loadu_pd(prev + k);
      const __m256d c = _mm256_loadu_pd(cur + k);
      const __m256d n = _mm256_loadu_pd(next + k);
      _mm256_storeu_pd(v + k, _mm256_mul_pd(_mm256_sub_pd(n, p), vh));
      const __m256d d2 =
          _mm256_add_pd(_mm256_sub_pd(n, _mm256_mul_pd(two, c)), p);
      _mm256_storeu_pd(a + k, _mm256_mul_pd(d2, vi));
    }
    for (; k < width; ++k) {
      v[k] = (next[k] - prev[k]) * half_inv_dt;
      a[k] = ((next[k] - 2.0 * cur[k]) + prev[k]) * inv_dt2;
    }
  }
}

// Four channels per lane group; the recurrence stays serial in time.
void iir_filter(const double* b, const double* a, const double* zi,
                double* data, std::size_t frames, std::size_t channels) {
  const __m256d b0 = _mm256_set1_pd(b[0]), b1 = _mm256_set1_pd(b[1]),
                b2 = _mm256_set1_pd(b[2]), b3 = _mm256_set1_pd(b[3]),
                b4 = _mm256_set1_pd(b[4]);
  const __m256d a1 = _mm256_set1_pd(a[1]), a2 = _mm256_set1_pd(a[2]),
                a3 = _mm256_set1_pd(a[3]), a4 = _mm256_set1_pd(a[4]);
  std::size_t c = 0;
  for (; c + 4 <= channels; c += 4) {
    const __m256d x0 = _mm256_loadu_pd(data + c);
    __m256d z0 = _mm256_mul_pd(_mm256_set1_pd(zi[0]), x0);
    __m256d z1 = _mm256_mul_pd(_mm256_set1_pd(zi[1]), x0);
    __m256d z2 = _mm256_mul_pd(_mm256_set1_pd(zi[2]), x0);
    __m256d z3 = _mm256_mul_pd(_mm256_set1_pd(zi[3]), x0);
    for (std::size_t t = 0; t < frames; ++t) {
      double* s = data + t * channels + c;
      const __m256d x = _mm256_loadu_pd(s);
      const __m256d y = _mm256_add_pd(_mm256_mul_pd(b0, x), z0);
      z0 = _mm256_add_pd(
          _mm256_sub_pd(_mm256_mul_pd(b1, x), _mm256_mul_pd(a1, y)), z1);
      z1 = _mm256_add_pd(
          _mm256_sub_pd(_mm256_mul_pd(b2, x), _mm256_mul_pd(a2, y)), z2);
      z2 = _mm256_add_pd(
          _mm256_sub_pd(_mm256_mul_pd(b3, x), _mm256_mul_pd(a3, y)), z3);
      z3 = _mm256_sub_pd(_mm256_mul_pd(b4, x), _mm256_mul_pd(a4, y));
      _mm256_storeu_pd(s, y);
    }
  }
  if (c < channels) {
    // Remaining channels: run the reference kernel on a strided view by
    // filtering each channel as a 1-channel signal.
    std::vector<double> column(frames);
    for (; c < channels; ++c) {
      for (std::size_t t = 0; t < frames; ++t) column[t] = data[t * channels + c];
      scalar_kernels().iir_filter(b, a, zi, column.data(), frames, 1);
      for (std::size_t t = 0; t < frames; ++t) data[t * channels + c] = column[t];
    }
  }
}

// Gathers x, y, z of four consecutive triples per iteration.
double sum_norm3_diff(const double* lhs, const double* rhs,
                      std::size_t count) {
  const __m256i idx = _mm256_setr_epi64x(0, 3, 6, 9);
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    const double* l = lhs + 3 * k;
    const double* r = rhs + 3 * k;
    const __m256d dx = _mm256_sub_pd(_mm256_i64gather_pd(l, idx, 8),
                                     _mm256_i64gather_pd(r, idx, 8));
    const __m256d dy = _mm256_sub_pd(_mm256_i64gather_pd(l + 1, idx, 8),
                                     _mm256_i64gather_pd(r + 1, idx, 8));
    const __m256d dz = _mm256_sub_pd(_mm256_i64gather_pd(l + 2, idx, 8),
                                     _mm256_i64gather_pd(r + 2, idx, 8));
    const __m256d sq = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
        _mm256_mul_pd(dz, dz));
    acc = _mm256_add_pd(acc, _mm256_sqrt_pd(sq));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  if (k < count) {
    sum += scalar_kernels().sum_norm3_diff(lhs + 3 * k, rhs + 3 * k, count - k);
  }
  return sum;
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{&central_differences, &iir_filter,
                                 &sum_norm3_diff};
  return table;
}

}  // namespace idyn::simd::detail
