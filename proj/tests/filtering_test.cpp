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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "data/filter_reference.hpp"
#include "idyn/noise.hpp"
#include "idyn/rnea.hpp"
#include "test_support.hpp"

namespace idyn {
namespace {

using testing::kPi;

std::vector<double> reference_input() {
  std::vector<double> x;
  for (int t = 0; t < 40; ++t) x.push_back(testing::filtfilt_input(t));
  return x;
}

TEST(Butterworth, MatchesScipyCoefficients) {
  for (const auto& ref : testing::kButterReference) {
    const IirCoeffs c = butterworth_coeffs({ref.cutoff_hz, ref.sample_rate_hz});
    for (int k = 0; k <= kFilterOrder; ++k) {
      EXPECT_NEAR(c.b[k], ref.b[k], 1e-9) << ref.cutoff_hz << " b" << k;
      EXPECT_NEAR(c.a[k], ref.a[k], 1e-9) << ref.cutoff_hz << " a" << k;
    }
  }
}

TEST(Butterworth, SteadyStateMatchesScipy) {
  const IirCoeffs c = butterworth_coeffs({6.0, 30.0});
  for (int k = 0; k < kFilterOrder; ++k) {
    EXPECT_NEAR(c.zi[k], testing::kZi6Hz[k], 1e-9);
  }
  // A unit step started from zi stays at 1.
  std::vector<double> step(50, 1.0);
  lfilter_inplace<double>(c, step);
  for (double v : step) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(Butterworth, MagnitudeResponse) {
  const IirCoeffs c = butterworth_coeffs({6.0, 30.0});
  EXPECT_NEAR(squared_magnitude(c, 0.0, 30.0), 1.0, 1e-12);
  // Half power at the cutoff, for any cutoff.
  for (double fc : {2.0, 6.0, 7.5, 12.0}) {
    const IirCoeffs cc = butterworth_coeffs({fc, 30.0});
    EXPECT_NEAR(squared_magnitude(cc, fc, 30.0), 0.5, 1e-9) << fc;
  }
  // Forward-backward gain is |H|^2.
  EXPECT_GE(squared_magnitude(c, 1.0, 30.0), 0.999);
  EXPECT_LT(squared_magnitude(c, 12.0, 30.0), 0.01);
  // Monotone in frequency.
  double prev = 1.0;
  for (double f = 0.25; f < 15.0; f += 0.25) {
    const double m = squared_magnitude(c, f, 30.0);
    EXPECT_LE(m, prev + 1e-15);
    prev = m;
  }
}

TEST(Butterworth, RejectsBadCutoff) {
  EXPECT_THROW(butterworth_coeffs({0.0, 30.0}), InvalidInput);
  EXPECT_THROW(butterworth_coeffs({15.0, 30.0}), InvalidInput);
  EXPECT_THROW(butterworth_coeffs({-1.0, 30.0}), InvalidInput);
  EXPECT_THROW(butterworth_coeffs({6.0, 0.0}), InvalidInput);
}

TEST(Filtfilt, MatchesScipyReference) {
  const std::vector<double> x = reference_input();
  const std::vector<double> y =
      filtfilt<double>(x, butterworth_coeffs({6.0, 30.0}));
  ASSERT_EQ(y.size(), testing::kFiltfilt6Hz.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    EXPECT_NEAR(y[i], testing::kFiltfilt6Hz[i], 1e-9) << i;
  }
}

TEST(Filtfilt, ConstantPassesUnchanged) {
  const std::vector<double> x(30, 2.75);
  for (double v : filtfilt(x, FilterSpec{6.0, 30.0})) EXPECT_NEAR(v, 2.75, 1e-12);
}

TEST(Filtfilt, Linear) {
  std::mt19937_64 rng(51);
  std::normal_distribution<double> n;
  std::vector<double> x(64), y(64), z(64);
  for (int i = 0; i < 64; ++i) {
    x[i] = n(rng);
    y[i] = n(rng);
    z[i] = 1.5 * x[i] - 2.0 * y[i];
  }
  const FilterSpec spec{6.0, 30.0};
  const auto fx = filtfilt(x, spec), fy = filtfilt(y, spec),
             fz = filtfilt(z, spec);
  for (int i = 0; i < 64; ++i) {
    EXPECT_NEAR(fz[i], 1.5 * fx[i] - 2.0 * fy[i], 1e-12);
  }
}

TEST(Filtfilt, ZeroPhaseOnSinusoid) {
  // A passband sinusoid comes back in phase, scaled by |H|^2.
  const double f = 1.5, fs = 30.0;
  std::vector<double> x;
  for (int t = 0; t < 300; ++t) x.push_back(std::sin(2 * kPi * f * t / fs));
  const IirCoeffs c = butterworth_coeffs({6.0, fs});
  const std::vector<double> y = filtfilt<double>(x, c);
  const double gain = squared_magnitude(c, f, fs);
  for (int t = 60; t < 240; ++t) EXPECT_NEAR(y[t], gain * x[t], 1e-6);
}

TEST(Filtfilt, AttenuatesHighFrequency) {
  std::vector<double> x;
  for (int t = 0; t < 300; ++t) x.push_back(std::cos(kPi * 0.9 * t));
  const std::vector<double> y = filtfilt(x, FilterSpec{6.0, 30.0});
  for (int t = 60; t < 240; ++t) EXPECT_LT(std::abs(y[t]), 1e-3);
}

TEST(Filtfilt, TooShort) {
  const std::vector<double> x(15, 1.0);
  EXPECT_THROW(filtfilt(x, FilterSpec{6.0, 30.0}), SequenceTooShort);
  const std::vector<double> ok(16, 1.0);
  EXPECT_NO_THROW(filtfilt(ok, FilterSpec{6.0, 30.0}));
}

TEST(Filtfilt, ColumnsMatchSingleChannel) {
  std::mt19937_64 rng(52);
  std::normal_distribution<double> n;
  const IirCoeffs c = butterworth_coeffs({6.0, 30.0});
  for (std::size_t channels : {1u, 3u, 4u, 7u, 75u}) {
    const std::size_t frames = 33;
    std::vector<double> data(frames * channels);
    for (double& v : data) v = n(rng);
    std::vector<double> cols = data;
    filtfilt_columns(cols, frames, channels, c);
    for (std::size_t ch = 0; ch < channels; ++ch) {
      std::vector<double> one(frames);
      for (std::size_t t = 0; t < frames; ++t) one[t] = data[t * channels + ch];
      const std::vector<double> y = filtfilt<double>(one, c);
      for (std::size_t t = 0; t < frames; ++t) {
        EXPECT_EQ(cols[t * channels + ch], y[t]) << channels << " " << ch;
      }
    }
  }
}

TEST(FilterMotion, UsesMotionFrameRate) {
  std::mt19937_64 rng(53);
  MotionSequence m = testing::random_motion(rng, 40, 0.3, 60.0);
  const MotionSequence a = filter_motion(m, FilterSpec{6.0, 30.0});
  const MotionSequence b = filter_motion(m, FilterSpec{6.0, 60.0});
  for (int t = 0; t < m.size(); ++t) {
    EXPECT_EQ(testing::max_abs_diff(a.frames[t].rot[5], b.frames[t].rot[5]),
              0.0);
  }
  m.fps = 10.0;  // 6 Hz is above Nyquist
  EXPECT_THROW(filter_motion(m, FilterSpec{}), InvalidInput);
}

TEST(FilterMotion, PreservesCleanWalkAndRemovesNoise) {
  const Skeleton skel = default_skeleton();
  const BodySegments segs = build_segment_params(skel);
  const MotionSequence clean = synth_walk();
  const DynamicsResult ref =
      dynamics_from_poses<double>(skel, segs, clean.frames, clean.fps);
  double mean_norm = 0.0;
  int count = 0;
  for (int t = kBoundaryFrames; t < ref.frames - kBoundaryFrames; ++t) {
    for (int j = 0; j < kNumJoints; ++j) {
      mean_norm += norm(ref.torque[ref.at(t, j)]);
      ++count;
    }
  }
  mean_norm /= count;

  auto error_of = [&](const MotionSequence& m) {
    return torque_error(
        dynamics_from_poses<double>(skel, segs, m.frames, m.fps), ref);
  };
  EXPECT_LT(error_of(filter_motion(clean, {})), 0.15 * mean_norm);

  const MotionSequence noisy = add_uniform_noise(clean, 0.05, 7);
  EXPECT_LT(error_of(filter_motion(noisy, {})), 0.6 * error_of(noisy));
}

}  // namespace
}  // namespace idyn
