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

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace idyn {
namespace {

// Rest-pose offsets of a 1.75 m adult in the SMPL T-pose, m.
//
// These approximate the mean SMPL rest skeleton (pelvis-to-hip 0.09 m
// lateral, thigh 0.38 m, shank 0.40 m, spine segments 0.10-0.13 m). They
// are not the SMPL regressor output, so absolute torques only match
// published numbers in order of magnitude.
constexpr std::array<Vec3, kNumJoints> kTemplateOffsets = {{
    {0.0, 0.93, 0.0},      // pelvis (root position)
    {0.09, -0.08, 0.0},    // left_hip
    {-0.09, -0.08, 0.0},   // right_hip
    {0.0, 0.11, -0.02},    // spine1
    {0.0, -0.38, 0.0},     // left_knee
    {0.0, -0.38, 0.0},     // right_knee
    {0.0, 0.13, 0.0},      // spine2
    {0.0, -0.40, -0.03},   // left_ankle
    {0.0, -0.40, -0.03},   // right_ankle
    {0.0, 0.10, 0.02},     // spine3
    {0.0, -0.06, 0.12},    // left_foot
    {0.0, -0.06, 0.12},    // right_foot
    {0.0, 0.20, -0.02},    // neck
    {0.07, 0.12, -0.01},   // left_collar
    {-0.07, 0.12, -0.01},  // right_collar
    {0.0, 0.09, 0.05},     // head
    {0.11, 0.03, -0.01},   // left_shoulder
    {-0.11, 0.03, -0.01},  // right_shoulder
    {0.26, 0.0, 0.0},      // left_elbow
    {-0.26, 0.0, 0.0},     // right_elbow
    {0.25, 0.0, 0.0},      // left_wrist
    {-0.25, 0.0, 0.0},     // right_wrist
    {0.08, 0.0, 0.0},      // left_hand
    {-0.08, 0.0, 0.0},     // right_hand
}};

}  // namespace

void Skeleton::validate() const {
  if (!(total_mass > 0.0) || !std::isfinite(total_mass)) {
    throw InvalidInput("skeleton: total_mass must be positive");
  }
  if (!(total_height > 0.0) || !std::isfinite(total_height)) {
    throw InvalidInput("skeleton: total_height must be positive");
  }
  if (parent[0] != kNoParent) {
    throw InvalidInput("skeleton: joint 0 must be the root");
  }
  for (int i = 0; i < kNumJoints; ++i) {
    if (i > 0 && (parent[i] < 0 || parent[i] >= i)) {
      throw InvalidInput("skeleton: parent index of joint " +
                         std::to_string(i) + " must be in [0, " +
                         std::to_string(i) + ")");
    }
    if (!is_finite(offset[i])) {
      throw InvalidInput("skeleton: non-finite offset at joint " +
                         std::to_string(i));
    }
  }
}

std::vector<int> Skeleton::children(int joint) const {
  std::vector<int> out;
  for (int i = joint + 1; i < kNumJoints; ++i) {
    if (parent[i] == joint) out.push_back(i);
  }
  return out;
}

int joint_index(std::string_view name) {
  for (int i = 0; i < kNumJoints; ++i) {
    if (kJointNames[i] == name) return i;
  }
  return -1;
}

Skeleton default_skeleton(double total_mass, double total_height) {
  if (!(total_mass > 0.0) || !(total_height > 0.0)) {
    throw InvalidInput("default_skeleton: mass and height must be positive");
  }
  Skeleton s;
  const double scale = total_height / kTemplateHeight;
  for (int i = 0; i < kNumJoints; ++i) {
    s.joint_names[i] = std::string(kJointNames[i]);
    s.parent[i] = kSmplParents[i];
    s.offset[i] = scale * kTemplateOffsets[i];
  }
  s.total_mass = total_mass;
  s.total_height = total_height;
  return s;
}

std::string skeleton_to_json(const Skeleton& skel) {
  nlohmann::json j;
  j["joint_names"] = skel.joint_names;
  j["parents"] = skel.parent;
  auto offsets = nlohmann::json::array();
  for (const Vec3& o : skel.offset) offsets.push_back({o.x, o.y, o.z});
  j["offsets"] = offsets;
  j["total_mass"] = skel.total_mass;
  j["total_height"] = skel.total_height;
  return j.dump(2);
}

Skeleton skeleton_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("skeleton: ") + e.what());
  }
  Skeleton s;
  try {
    const auto& names = j.at("joint_names");
    const auto& parents = j.at("parents");
    const auto& offsets = j.at("offsets");
    if (names.size() != kNumJoints || parents.size() != kNumJoints ||
        offsets.size() != kNumJoints) {
      throw ParseError("skeleton: expected 24 joint_names, parents, offsets");
    }
    for (int i = 0; i < kNumJoints; ++i) {
      s.joint_names[i] = names[i].get<std::string>();
      s.parent[i] = parents[i].get<int>();
      const auto& o = offsets[i];
      if (o.size() != 3) {
        throw ParseError("skeleton: offset of joint " + std::to_string(i) +
                         " must have 3 entries");
      }
      s.offset[i] = {o[0].get<double>(), o[1].get<double>(),
                     o[2].get<double>()};
    }
    s.total_mass = j.at("total_mass").get<double>();
    s.total_height = j.at("total_height").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("skeleton: ") + e.what());
  }
  try {
    s.validate();
  } catch (const InvalidInput& e) {
    throw ParseError(e.what());
  }
  return s;
}

Skeleton load_skeleton(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open skeleton file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return skeleton_from_json(buf.str());
}

void save_skeleton(const Skeleton& skel, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write skeleton file " + path.string());
  out << skeleton_to_json(skel) << '\n';
}

FrameKinematics forward_kinematics_checked(const Skeleton& skel,
                                           const Pose& pose) {
  for (const Vec3& r : pose.rot) {
    if (!is_finite(r)) throw InvalidInput("forward_kinematics: non-finite pose");
  }
  if (!is_finite(pose.trans)) {
    throw InvalidInput("forward_kinematics: non-finite translation");
  }
  return forward_kinematics(skel, pose);
}

}  // namespace idyn
