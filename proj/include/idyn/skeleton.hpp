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

// The 24-joint SMPL kinematic tree and forward kinematics.
//
// Coordinates are Y-up and right-handed; the body faces +z and its left side
// is +x. Joint order is the standard SMPL order (see kJointNames) and is part
// of every file format in this project.

#ifndef IDYN_SKELETON_HPP_
#define IDYN_SKELETON_HPP_

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "idyn/rotations.hpp"

namespace idyn {

inline constexpr int kNumJoints = 24;
inline constexpr int kNoParent = -1;

enum Joint : int {
  kPelvis = 0,
  kLeftHip,
  kRightHip,
  kSpine1,
  kLeftKnee,
  kRightKnee,
  kSpine2,
  kLeftAnkle,
  kRightAnkle,
  kSpine3,
  kLeftFoot,
  kRightFoot,
  kNeck,
  kLeftCollar,
  kRightCollar,
  kHead,
  kLeftShoulder,
  kRightShoulder,
  kLeftElbow,
  kRightElbow,
  kLeftWrist,
  kRightWrist,
  kLeftHand,
  kRightHand,
};

inline constexpr std::array<std::string_view, kNumJoints> kJointNames = {
    "pelvis",         "left_hip",       "right_hip",   "spine1",
    "left_knee",      "right_knee",     "spine2",      "left_ankle",
    "right_ankle",    "spine3",         "left_foot",   "right_foot",
    "neck",           "left_collar",    "right_collar", "head",
    "left_shoulder",  "right_shoulder", "left_elbow",  "right_elbow",
    "left_wrist",     "right_wrist",    "left_hand",   "right_hand"};

inline constexpr std::array<int, kNumJoints> kSmplParents = {
    kNoParent, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8,
    9,         9, 9, 12, 13, 14, 16, 17, 18, 19, 20, 21};

// Height of the built-in template, m.
inline constexpr double kTemplateHeight = 1.75;
inline constexpr double kDefaultMass = 75.0;

// Gravity in world coordinates, m/s^2.
inline constexpr Vec3 kGravity{0.0, -9.81, 0.0};

struct Skeleton {
  std::array<std::string, kNumJoints> joint_names;
  std::array<int, kNumJoints> parent{};
  // offset[i]: position of joint i in its parent's frame at zero pose, m.
  // offset[0] is the template position of the root.
  std::array<Vec3, kNumJoints> offset{};
  double total_mass = kDefaultMass;
  double total_height = kTemplateHeight;

  // Throws InvalidInput if the tree or the numbers are malformed.
  void validate() const;
  std::vector<int> children(int joint) const;
};

// Index of a joint name, or -1.
int joint_index(std::string_view name);

// The SMPL topology with the template rest offsets scaled by
// total_height / 1.75.
Skeleton default_skeleton(double total_mass = kDefaultMass,
                          double total_height = kTemplateHeight);

Skeleton load_skeleton(const std::filesystem::path& path);
void save_skeleton(const Skeleton& skel, const std::filesystem::path& path);
std::string skeleton_to_json(const Skeleton& skel);
Skeleton skeleton_from_json(std::string_view text);

// One frame of SMPL parameters. rot[0] is the root orientation, rot[1..23]
// the body pose (each relative to its parent); trans is the root translation.
template <class T>
struct PoseT {
  std::array<Vec3T<T>, kNumJoints> rot{};
  Vec3T<T> trans{};

  Vec3T<T>& root_orient() { return rot[0]; }
  const Vec3T<T>& root_orient() const { return rot[0]; }
};
using Pose = PoseT<double>;

template <class T>
struct FrameKinematicsT {
  std::array<Vec3T<T>, kNumJoints> world_pos{};
  std::array<Mat3T<T>, kNumJoints> world_rot{};
};
using FrameKinematics = FrameKinematicsT<double>;

template <class T>
Vec3T<T> lift(const Vec3& v) {
  return {T(v.x), T(v.y), T(v.z)};
}

// world_rot[i] = world_rot[parent] * exp(rot[i]);
// world_pos[i] = world_pos[parent] + world_rot[parent] * offset[i].
template <class T>
FrameKinematicsT<T> forward_kinematics(const Skeleton& skel,
                                       const PoseT<T>& pose) {
  FrameKinematicsT<T> out;
  out.world_rot[0] = rodrigues(pose.rot[0]);
  out.world_pos[0] = pose.trans + lift<T>(skel.offset[0]);
  for (int i = 1; i < kNumJoints; ++i) {
    const int p = skel.parent[i];
    out.world_rot[i] = out.world_rot[p] * rodrigues(pose.rot[i]);
    out.world_pos[i] = out.world_pos[p] + out.world_rot[p] * lift<T>(skel.offset[i]);
  }
  return out;
}

// Validates finiteness before running FK on plain doubles.
FrameKinematics forward_kinematics_checked(const Skeleton& skel,
                                           const Pose& pose);

}  // namespace idyn

#endif  // IDYN_SKELETON_HPP_
