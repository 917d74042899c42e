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

#include "idyn/skeleton.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"

namespace idyn {
namespace {

using testing::kPi;
using testing::max_abs_diff;

// Rest-pose world positions by walking up the parent chain.
Vec3 rest_position(const Skeleton& s, int j) {
  Vec3 p = s.offset[j];
  for (int k = s.parent[j]; k != kNoParent; k = s.parent[k]) p += s.offset[k];
  return p;
}

TEST(Skeleton, SmplTopology) {
  const Skeleton s = default_skeleton();
  const int expected[kNumJoints] = {-1, 0, 0,  0,  1,  2,  3,  4,
                                    5,  6, 7,  8,  9,  9,  9,  12,
                                    13, 14, 16, 17, 18, 19, 20, 21};
  for (int i = 0; i < kNumJoints; ++i) {
    EXPECT_EQ(s.parent[i], expected[i]) << i;
    if (i > 0) {
      EXPECT_LT(s.parent[i], i);
    }
    EXPECT_EQ(joint_index(kJointNames[i]), i);
  }
  EXPECT_EQ(kJointNames[kSpine1], "spine1");
  EXPECT_EQ(kJointNames[kRightHand], "right_hand");
  EXPECT_EQ(joint_index("tail"), -1);
  EXPECT_EQ(s.children(kSpine3), (std::vector<int>{kNeck, kLeftCollar,
                                                   kRightCollar}));
}

TEST(Skeleton, TemplateScaleIsOneAtDefaultHeight) {
  const Skeleton a = default_skeleton(75.0, 1.75);
  const Skeleton b = default_skeleton(60.0, kTemplateHeight);
  for (int i = 0; i < kNumJoints; ++i) {
    EXPECT_EQ(max_abs_diff(a.offset[i], b.offset[i]), 0.0);
  }
  EXPECT_EQ(a.offset[kLeftHip].x, 0.09);
  EXPECT_EQ(a.offset[kLeftKnee].y, -0.38);
}

TEST(Skeleton, OffsetsScaleLinearlyWithHeight) {
  const Skeleton a = default_skeleton(75.0, 1.75);
  const Skeleton b = default_skeleton(75.0, 3.50);
  for (int i = 0; i < kNumJoints; ++i) {
    EXPECT_EQ(b.offset[i].x, 2.0 * a.offset[i].x);
    EXPECT_EQ(b.offset[i].y, 2.0 * a.offset[i].y);
    EXPECT_EQ(b.offset[i].z, 2.0 * a.offset[i].z);
  }
  EXPECT_EQ(b.total_height, 3.5);
}

TEST(Skeleton, RejectsBadParameters) {
  EXPECT_THROW(default_skeleton(0.0, 1.75), InvalidInput);
  EXPECT_THROW(default_skeleton(75.0, -1.0), InvalidInput);
  Skeleton s = default_skeleton();
  s.parent[5] = 7;
  EXPECT_THROW(s.validate(), InvalidInput);
  s = default_skeleton();
  s.offset[3].y = std::nan("");
  EXPECT_THROW(s.validate(), InvalidInput);
}

TEST(Skeleton, JsonRoundTrip) {
  Skeleton s = default_skeleton(81.0, 1.9);
  s.offset[kLeftElbow].x = 0.2712345678901234;
  const Skeleton r = skeleton_from_json(skeleton_to_json(s));
  EXPECT_EQ(r.total_mass, s.total_mass);
  EXPECT_EQ(r.total_height, s.total_height);
  for (int i = 0; i < kNumJoints; ++i) {
    EXPECT_EQ(r.parent[i], s.parent[i]);
    EXPECT_EQ(max_abs_diff(r.offset[i], s.offset[i]), 0.0);
  }
}

TEST(Skeleton, JsonErrors) {
  EXPECT_THROW(skeleton_from_json("{"), ParseError);
  EXPECT_THROW(skeleton_from_json("{\"total_mass\": 70}"), ParseError);
}

TEST(ForwardKinematics, ZeroPoseAccumulatesOffsets) {
  const Skeleton s = default_skeleton();
  const FrameKinematics fk = forward_kinematics(s, Pose{});
  for (int j = 0; j < kNumJoints; ++j) {
    EXPECT_LT(max_abs_diff(fk.world_pos[j], rest_position(s, j)), 1e-15) << j;
    EXPECT_EQ(max_abs_diff(fk.world_rot[j], Mat3::identity()), 0.0);
  }
}

TEST(ForwardKinematics, TranslationShiftsEveryJoint) {
  const Skeleton s = default_skeleton();
  Pose p;
  p.trans = {1, 2, 3};
  const FrameKinematics fk = forward_kinematics(s, p);
  for (int j = 0; j < kNumJoints; ++j) {
    EXPECT_LT(max_abs_diff(fk.world_pos[j], rest_position(s, j) + p.trans),
              1e-15);
  }
}

TEST(ForwardKinematics, BentElbowByHand) {
  const Skeleton s = default_skeleton();
  Pose p;
  const double th = kPi / 2;
  p.rot[kLeftElbow] = {0.0, th, 0.0};
  const FrameKinematics fk = forward_kinematics(s, p);
  // Parent frames are unrotated, so the elbow is at its rest position and
  // the wrist offset is turned by Ry(th): (x, 0, 0) -> (x cos th, 0, -x sin th).
  const Vec3 elbow = rest_position(s, kLeftElbow);
  const double x = s.offset[kLeftWrist].x;
  const Vec3 wrist = elbow + Vec3{x * std::cos(th), 0.0, -x * std::sin(th)};
  EXPECT_LT(max_abs_diff(fk.world_pos[kLeftElbow], elbow), 1e-15);
  EXPECT_LT(max_abs_diff(fk.world_pos[kLeftWrist], wrist), 1e-15);
  // The hand follows the same rigid transform.
  const Vec3 hand =
      wrist + Vec3{s.offset[kLeftHand].x * std::cos(th), 0.0,
                   -s.offset[kLeftHand].x * std::sin(th)};
  EXPECT_LT(max_abs_diff(fk.world_pos[kLeftHand], hand), 1e-15);
}

TEST(ForwardKinematics, BonesAreRigid) {
  const Skeleton s = default_skeleton();
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    Pose p;
    for (Vec3& r : p.rot) r = testing::random_axis_angle(rng, 0.0, kPi);
    p.trans = testing::random_vec(rng, 2.0);
    const FrameKinematics fk = forward_kinematics(s, p);
    for (int j = 1; j < kNumJoints; ++j) {
      EXPECT_NEAR(norm(fk.world_pos[j] - fk.world_pos[s.parent[j]]),
                  norm(s.offset[j]), 1e-9);
    }
  }
}

TEST(ForwardKinematics, GlobalRotationEquivariance) {
  const Skeleton s = default_skeleton();
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    Pose p;
    for (Vec3& r : p.rot) r = testing::random_axis_angle(rng, 0.0, 1.5);
    const Mat3 g = rodrigues(testing::random_axis_angle(rng, 0.0, 2.5));
    Pose q = p;
    q.rot[0] = mat_log(g * rodrigues(p.rot[0]));
    const FrameKinematics a = forward_kinematics(s, p);
    const FrameKinematics b = forward_kinematics(s, q);
    for (int j = 0; j < kNumJoints; ++j) {
      EXPECT_LT(max_abs_diff(b.world_pos[j] - b.world_pos[0],
                             g * (a.world_pos[j] - a.world_pos[0])),
                1e-12);
      EXPECT_LT(max_abs_diff(b.world_rot[j], g * a.world_rot[j]), 1e-12);
    }
  }
}

TEST(ForwardKinematics, LipschitzInPose) {
  // A rotation-vector change of d moves the rotation by at most |d| rad, and
  // no joint is more than 2 m from any ancestor, so
  //   |dp_j| <= 2 * sum_k |d_k| + |d_trans|.
  const Skeleton s = default_skeleton();
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    Pose p, q;
    double budget = 0.0;
    for (int j = 0; j < kNumJoints; ++j) {
      p.rot[j] = testing::random_axis_angle(rng, 0.0, 2.0);
      const Vec3 d = testing::random_vec(rng, 1e-3);
      q.rot[j] = p.rot[j] + d;
      budget += 2.0 * norm(d);
    }
    q.trans = testing::random_vec(rng, 1e-3);
    budget += norm(q.trans);
    const FrameKinematics a = forward_kinematics(s, p);
    const FrameKinematics b = forward_kinematics(s, q);
    for (int j = 0; j < kNumJoints; ++j) {
      EXPECT_LE(norm(a.world_pos[j] - b.world_pos[j]), budget + 1e-12);
    }
  }
}

TEST(ForwardKinematics, CheckedVariantRejectsNonFinite) {
  Pose p;
  p.rot[4].y = std::nan("");
  EXPECT_THROW(forward_kinematics_checked(default_skeleton(), p),
               InvalidInput);
}

}  // namespace
}  // namespace idyn
