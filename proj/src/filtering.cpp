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

#include "idyn/filtering.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "idyn/simd/kernels.hpp"

namespace idyn {
namespace {

using cplx = std::complex<double>;

// Solves the 4x4 system m x = rhs by Gaussian elimination with partial
// pivoting.
std::array<double, 4> solve4(std::array<std::array<double, 4>, 4> m,
                             std::array<double, 4> rhs) {
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    }
    std::swap(m[col], m[piv]);
    std::swap(rhs[col], rhs[piv]);
    for (int r = col + 1; r < 4; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::array<double, 4> x{};
  for (int r = 3; r >= 0; --r) {
    double s = rhs[r];
    for (int c = r + 1; c < 4; ++c) s -= m[r][c] * x[c];
    x[r] = s / m[r][r];
  }
  return x;
}

}  // namespace

void FilterSpec::validate() const {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
    throw InvalidInput("filter: sample rate must be positive");
  }
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < 0.5 * sample_rate_hz)) {
    throw InvalidInput("filter: cutoff must lie in (0, Nyquist), got " +
                       std::to_string(cutoff_hz) + " Hz at " +
                       std::to_string(sample_rate_hz) + " Hz sampling");
  }
}

IirCoeffs butterworth_coeffs(const FilterSpec& spec) {
  spec.validate();
  const double fs = spec.sample_rate_hz;
  const double two_fs = 2.0 * fs;
  // Pre-warped analog cutoff, rad/s.
  const double wc = two_fs * std::tan(std::numbers::pi * spec.cutoff_hz / fs);

  // Polynomial in z^-1 with the digital poles as roots.
  std::array<cplx, kFilterOrder + 1> poly{};
  poly[0] = 1.0;
  for (int k = 1; k <= kFilterOrder; ++k) {
    const double angle =
        std::numbers::pi * (2.0 * k + kFilterOrder - 1) / (2.0 * kFilterOrder);
    const cplx s = wc * std::exp(cplx(0.0, angle));
    const cplx z = (two_fs + s) / (two_fs - s);
    for (int d = k; d >= 1; --d) poly[d] -= z * poly[d - 1];
  }

  IirCoeffs c;
  double a_sum = 0.0;
  for (int d = 0; d <= kFilterOrder; ++d) {
    c.a[d] = poly[d].real();
    a_sum += c.a[d];
  }
  // Zeros at z = -1: (1 + z^-1)^4; gain fixed by unit DC response.
  constexpr std::array<double, 5> kBinomial = {1.0, 4.0, 6.0, 4.0, 1.0};
  const double gain = a_sum / 16.0;
  for (int d = 0; d <= kFilterOrder; ++d) c.b[d] = gain * kBinomial[d];

  // Steady state: (I - A^T) zi = b[1:] - a[1:] b[0], A the companion matrix.
  std::array<std::array<double, 4>, 4> m{};
  std::array<double, 4> rhs{};
  for (int r = 0; r < 4; ++r) {
    m[r][r] = 1.0;
    m[r][0] += c.a[r + 1];
    if (r + 1 < 4) m[r][r + 1] -= 1.0;
    rhs[r] = c.b[r + 1] - c.a[r + 1] * c.b[0];
  }
  c.zi = solve4(m, rhs);
  return c;
}

double squared_magnitude(const IirCoeffs& c, double freq_hz,
                         double sample_rate_hz) {
  const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate_hz;
  cplx num = 0.0, den = 0.0;
  for (int d = 0; d <= kFilterOrder; ++d) {
    const cplx e = std::exp(cplx(0.0, -w * d));
    num += c.b[d] * e;
    den += c.a[d] * e;
  }
  return std::norm(num / den);
}

std::vector<double> filtfilt(std::span<const double> x,
                             const FilterSpec& spec) {
  return filtfilt<double>(x, butterworth_coeffs(spec));
}

void filtfilt_columns(std::span<double> data, std::size_t frames,
                      std::size_t channels, const IirCoeffs& c) {
  if (data.size() != frames * channels) {
    throw InvalidInput("filtfilt_columns: size mismatch");
  }
  if (frames <= static_cast<std::size_t>(kFilterPad)) {
    throw SequenceTooShort("filtfilt: need more than 15 samples, got " +
                           std::to_string(frames));
  }
  constexpr std::size_t pad = kFilterPad;
  const std::size_t ext_frames = frames + 2 * pad;
  std::vector<double> ext(ext_frames * channels);
  auto row = [&](std::vector<double>& v, std::size_t t) {
    return v.data() + t * channels;
  };
  auto src = [&](std::size_t t) { return data.data() + t * channels; };
  for (std::size_t k = 0; k < pad; ++k) {
    for (std::size_t ch = 0; ch < channels; ++ch) {
      row(ext, k)[ch] = 2.0 * src(0)[ch] - src(pad - k)[ch];
      row(ext, frames + pad + k)[ch] =
          2.0 * src(frames - 1)[ch] - src(frames - 2 - k)[ch];
    }
  }
  std::copy(data.begin(), data.end(), ext.begin() + pad * channels);

  auto reverse_rows = [&](std::vector<double>& v) {
    for (std::size_t lo = 0, hi = ext_frames - 1; lo < hi; ++lo, --hi) {
      std::swap_ranges(row(v, lo), row(v, lo) + channels, row(v, hi));
    }
  };
  const auto& k = simd::kernels();
  k.iir_filter(c.b.data(), c.a.data(), c.zi.data(), ext.data(), ext_frames,
               channels);
  reverse_rows(ext);
  k.iir_filter(c.b.data(), c.a.data(), c.zi.data(), ext.data(), ext_frames,
               channels);
  reverse_rows(ext);
  std::copy(ext.begin() + pad * channels,
            ext.begin() + (pad + frames) * channels, data.begin());
}

MotionSequence filter_motion(const MotionSequence& motion, FilterSpec spec) {
  motion.validate();
  spec.sample_rate_hz = motion.fps;
  const IirCoeffs c = butterworth_coeffs(spec);
  std::vector<double> ch = to_channels(motion);
  filtfilt_columns(ch, motion.size(), kPoseChannels, c);
  MotionSequence out;
  out.fps = motion.fps;
  from_channels(ch, out);
  return out;
}

}  // namespace idyn
