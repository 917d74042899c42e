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

#include "idyn/derivatives.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "test_support.hpp"

namespace idyn {
namespace {

using testing::kPi;
using testing::max_abs_diff;

constexpr double kDt = 1.0 / 30.0;

struct Series {
  std::vector<Vec3> vel, acc;
};

Series differentiate(const std::vector<Vec3>& pos, int width = 1) {
  Series s;
  linear_derivatives<double>(pos, static_cast<int>(pos.size()) / width, width,
                             kDt, s.vel, s.acc);
  return s;
}

TEST(LinearDerivatives, ConstantIsStill) {
  const std::vector<Vec3> pos(20, Vec3{1.5, -2.0, 0.25});
  const Series s = differentiate(pos);
  for (std::size_t t = 0; t < pos.size(); ++t) {
    EXPECT_EQ(max_abs_diff(s.vel[t], Vec3{}), 0.0);
    EXPECT_EQ(max_abs_diff(s.acc[t], Vec3{}), 0.0);
  }
}

TEST(LinearDerivatives, QuadraticIsExact) {
  const Vec3 a{0.5, -4.905, 2.0}, b{1.0, 3.0, -0.5}, c{0.1, 0.2, 0.3};
  std::vector<Vec3> pos;
  for (int t = 0; t < 40; ++t) {
    const double s = t * kDt;
    pos.push_back(s * s * a + s * b + c);
  }
  const Series s = differentiate(pos);
  for (int t = 1; t < 39; ++t) {
    EXPECT_LT(max_abs_diff(s.vel[t], 2.0 * (t * kDt) * a + b), 1e-11) << t;
    EXPECT_LT(max_abs_diff(s.acc[t], 2.0 * a), 1e-9) << t;
  }
  // Boundary frames copy their interior neighbour.
  EXPECT_EQ(max_abs_diff(s.vel[0], s.vel[1]), 0.0);
  EXPECT_EQ(max_abs_diff(s.acc[39], s.acc[38]), 0.0);
}

TEST(LinearDerivatives, SineMatchesDiscreteGain) {
  // The second difference of sin(w t) is exactly
  // -(4 / dt^2) sin^2(w dt / 2) sin(w t).
  const double w = 2 * kPi * 1.3;
  std::vector<Vec3> pos;
  for (int t = 0; t < 60; ++t) pos.push_back({std::sin(w * t * kDt), 0, 0});
  const Series s = differentiate(pos);
  const double gain = 4.0 / (kDt * kDt) * std::pow(std::sin(w * kDt / 2), 2);
  for (int t = 1; t < 59; ++t) {
    EXPECT_NEAR(s.acc[t].x, -gain * pos[t].x, 1e-9);
    EXPECT_NEAR(s.vel[t].x,
                std::sin(w * kDt) / kDt * std::cos(w * t * kDt), 1e-10);
  }
}

TEST(LinearDerivatives, LinearInInput) {
  std::mt19937_64 rng(31);
  std::vector<Vec3> x(25), y(25), z(25);
  for (int t = 0; t < 25; ++t) {
    x[t] = testing::random_vec(rng);
    y[t] = testing::random_vec(rng);
    z[t] = 2.5 * x[t] - 0.75 * y[t];
  }
  const Series sx = differentiate(x), sy = differentiate(y),
               sz = differentiate(z);
  for (int t = 0; t < 25; ++t) {
    EXPECT_LT(max_abs_diff(sz.acc[t], 2.5 * sx.acc[t] - 0.75 * sy.acc[t]),
              1e-9);
  }
}

TEST(LinearDerivatives, TimeReversal) {
  std::mt19937_64 rng(32);
  std::vector<Vec3> x(30);
  for (Vec3& v : x) v = testing::random_vec(rng);
  const std::vector<Vec3> r(x.rbegin(), x.rend());
  const Series sx = differentiate(x), sr = differentiate(r);
  for (int t = 1; t < 29; ++t) {
    EXPECT_LT(max_abs_diff(sr.vel[29 - t], -sx.vel[t]), 1e-12);
    EXPECT_LT(max_abs_diff(sr.acc[29 - t], sx.acc[t]), 1e-9);
  }
}

TEST(LinearDerivatives, InterleavedWidth) {
  // Several tracks per frame are differentiated independently.
  std::mt19937_64 rng(33);
  const int frames = 17, width = 5;
  std::vector<Vec3> all(frames * width);
  for (Vec3& v : all) v = testing::random_vec(rng);
  const Series s = differentiate(all, width);
  for (int j = 0; j < width; ++j) {
    std::vector<Vec3> one;
    for (int t = 0; t < frames; ++t) one.push_back(all[t * width + j]);
    const Series o = differentiate(one);
    for (int t = 0; t < frames; ++t) {
      EXPECT_EQ(max_abs_diff(s.acc[t * width + j], o.acc[t]), 0.0);
      EXPECT_EQ(max_abs_diff(s.vel[t * width + j], o.vel[t]), 0.0);
    }
  }
}

TEST(LinearDerivatives, Errors) {
  std::vector<Vec3> vel, acc;
  const std::vector<Vec3> two(2);
  EXPECT_THROW(linear_derivatives<double>(two, 2, 1, kDt, vel, acc),
               SequenceTooShort);
  const std::vector<Vec3> three(3);
  EXPECT_THROW(linear_derivatives<double>(three, 3, 1, 0.0, vel, acc),
               InvalidInput);
  EXPECT_THROW(linear_derivatives<double>(three, 3, 2, kDt, vel, acc),
               InvalidInput);
}

TEST(AngularDerivatives, ConstantSpin) {
  const Vec3 axis = Vec3{1, 2, -2} / 3.0;
  std::vector<Mat3> rot;
  for (int t = 0; t < 30; ++t) rot.push_back(rodrigues((t * kDt) * axis));
  std::vector<Vec3> w, a;
  angular_derivatives<double>(rot, 30, 1, kDt, w, a);
  for (int t = 0; t < 30; ++t) {
    EXPECT_LT(max_abs_diff(w[t], axis), 1e-12) << t;
    EXPECT_LT(max_abs_diff(a[t], Vec3{}), 1e-9) << t;
  }
}

TEST(AngularDerivatives, RampAboutFixedAxis) {
  // theta = alpha t^2 / 2 about a fixed axis: the central difference of theta
  // is exactly alpha t, and of that, alpha.
  const double alpha = 3.0;
  const Vec3 axis{0, 0, 1};
  std::vector<Mat3> rot;
  for (int t = 0; t < 40; ++t) {
    const double s = t * kDt;
    rot.push_back(rodrigues((0.5 * alpha * s * s) * axis));
  }
  std::vector<Vec3> w, a;
  angular_derivatives<double>(rot, 40, 1, kDt, w, a);
  for (int t = 2; t < 38; ++t) {
    EXPECT_NEAR(w[t].z, alpha * t * kDt, 1e-11);
    EXPECT_NEAR(a[t].z, alpha, 1e-9);
    EXPECT_NEAR(a[t].x, 0.0, 1e-12);
  }
}

TEST(AngularDerivatives, WorldFrameForRotatedBody) {
  // A body tilted by a constant rotation and spinning about its local z has
  // world angular velocity Q z.
  const Mat3 q = rodrigues(Vec3{0.3, -0.4, 0.2});
  std::vector<Mat3> rot;
  for (int t = 0; t < 10; ++t) {
    rot.push_back(q * rodrigues(Vec3{0, 0, 2.0 * t * kDt}));
  }
  std::vector<Vec3> w, a;
  angular_derivatives<double>(rot, 10, 1, kDt, w, a);
  for (int t = 0; t < 10; ++t) {
    EXPECT_LT(max_abs_diff(w[t], q * Vec3{0, 0, 2.0}), 1e-12);
  }
}

TEST(AmplificationGain, Values) {
  EXPECT_DOUBLE_EQ(amplification_gain(1.0), std::sqrt(6.0));
  EXPECT_NEAR(amplification_gain(kDt), 2204.540768, 1e-6);
  EXPECT_THROW(amplification_gain(0.0), InvalidInput);
}

TEST(AmplificationGain, MonteCarlo) {
  const double sigma = 0.01;
  const int n = 200000;
  std::mt19937_64 rng(34);
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<Vec3> pos(n);
  for (Vec3& v : pos) v = {noise(rng), noise(rng), noise(rng)};
  const Series s = differentiate(pos);
  double sum2 = 0.0;
  for (int t = 1; t + 1 < n; ++t) sum2 += dot(s.acc[t], s.acc[t]);
  const double rms = std::sqrt(sum2 / (3.0 * (n - 2)));
  EXPECT_NEAR(rms / (sigma * amplification_gain(kDt)), 1.0, 0.02);
}

TEST(KinematicState, MatchesPerFrameKinematics) {
  std::mt19937_64 rng(35);
  const MotionSequence m = testing::random_motion(rng, 12);
  const Skeleton skel = default_skeleton();
  const KinematicState ks =
      kinematic_state<double>(skel, m.frames, 1.0 / m.fps);
  EXPECT_EQ(ks.frames, 12);
  for (int t = 0; t < 12; ++t) {
    const FrameKinematics fk = forward_kinematics(skel, m.frames[t]);
    for (int j = 0; j < kNumJoints; ++j) {
      EXPECT_EQ(max_abs_diff(ks.pos[ks.at(t, j)], fk.world_pos[j]), 0.0);
    }
  }
  const std::vector<Pose> shortseq(2);
  EXPECT_THROW(kinematic_state<double>(skel, shortseq, kDt), SequenceTooShort);
}

}  // namespace
}  // namespace idyn
