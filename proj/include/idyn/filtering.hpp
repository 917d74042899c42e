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

// 4th-order Butterworth low-pass design and zero-phase (forward-backward)
// filtering.
//
// filtfilt pads both ends with an odd reflection of kFilterPad samples,
// starts each pass from the steady-state filter state scaled by the first
// sample, runs forward, reverses, runs again, reverses and strips the pad.

#ifndef IDYN_FILTERING_HPP_
#define IDYN_FILTERING_HPP_

#include <algorithm>
#include <array>
#include <span>
#include <vector>

#include "idyn/error.hpp"
#include "idyn/motion.hpp"

namespace idyn {

inline constexpr int kFilterOrder = 4;
// 3 * (order + 1).
inline constexpr int kFilterPad = 15;
inline constexpr double kDefaultCutoffHz = 6.0;

struct FilterSpec {
  double cutoff_hz = kDefaultCutoffHz;
  double sample_rate_hz = 30.0;

  // Throws InvalidInput unless 0 < cutoff < sample_rate / 2.
  void validate() const;
};

struct IirCoeffs {
  std::array<double, kFilterOrder + 1> b{};
  std::array<double, kFilterOrder + 1> a{};  // a[0] == 1
  // Steady-state state for a unit step input.
  std::array<double, kFilterOrder> zi{};
};

// Analog Butterworth prototype, frequency pre-warping and the bilinear
// transform.
IirCoeffs butterworth_coeffs(const FilterSpec& spec);

// Squared magnitude of the digital response at `freq_hz`.
double squared_magnitude(const IirCoeffs& c, double freq_hz,
                         double sample_rate_hz);

// One causal pass, in place, starting from zi * x[0]. Same operation order as
// the SIMD kernels.
template <class T>
void lfilter_inplace(const IirCoeffs& c, std::span<T> x) {
  if (x.empty()) return;
  const T x0 = x[0];
  T z0 = c.zi[0] * x0, z1 = c.zi[1] * x0, z2 = c.zi[2] * x0,
    z3 = c.zi[3] * x0;
  for (T& s : x) {
    const T in = s;
    const T y = c.b[0] * in + z0;
    z0 = (c.b[1] * in - c.a[1] * y) + z1;
    z1 = (c.b[2] * in - c.a[2] * y) + z2;
    z2 = (c.b[3] * in - c.a[3] * y) + z3;
    z3 = c.b[4] * in - c.a[4] * y;
    s = y;
  }
}

template <class T>
std::vector<T> filtfilt(std::span<const T> x, const IirCoeffs& c) {
  const std::size_t n = x.size();
  if (n <= static_cast<std::size_t>(kFilterPad)) {
    throw SequenceTooShort("filtfilt: need more than 15 samples, got " +
                           std::to_string(n));
  }
  constexpr std::size_t pad = kFilterPad;
  std::vector<T> ext(n + 2 * pad);
  for (std::size_t k = 0; k < pad; ++k) {
    ext[k] = 2.0 * x[0] - x[pad - k];
    ext[n + pad + k] = 2.0 * x[n - 1] - x[n - 2 - k];
  }
  for (std::size_t k = 0; k < n; ++k) ext[pad + k] = x[k];
  lfilter_inplace<T>(c, ext);
  std::reverse(ext.begin(), ext.end());
  lfilter_inplace<T>(c, ext);
  std::reverse(ext.begin(), ext.end());
  return std::vector<T>(ext.begin() + pad, ext.begin() + pad + n);
}

std::vector<double> filtfilt(std::span<const double> x,
                             const FilterSpec& spec);

// Zero-phase filtering of every column of a [frames][channels] array, in
// place. Uses the SIMD kernels.
void filtfilt_columns(std::span<double> data, std::size_t frames,
                      std::size_t channels, const IirCoeffs& c);

// Filters the 72 axis-angle channels and the 3 translation channels
// independently. spec.sample_rate_hz is replaced by motion.fps.
MotionSequence filter_motion(const MotionSequence& motion, FilterSpec spec);

}  // namespace idyn

#endif  // IDYN_FILTERING_HPP_
