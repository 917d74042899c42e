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

// Pose sequences, the .motion.json file format and a procedural walk.
//
// File schema:
//   {"fps": 30,
//    "frames": [{"root_trans": [x, y, z],
//                "pose": [[ax, ay, az], ... 24 entries in joint order]}, ...]}
// pose[0] is the root orientation.

#ifndef IDYN_MOTION_HPP_
#define IDYN_MOTION_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "idyn/skeleton.hpp"

namespace idyn {

// 72 rotation channels followed by 3 translation channels.
inline constexpr int kRotationChannels = 3 * kNumJoints;
inline constexpr int kPoseChannels = kRotationChannels + 3;

struct MotionSequence {
  double fps = 30.0;
  std::vector<Pose> frames;

  int size() const { return static_cast<int>(frames.size()); }
  double dt() const { return 1.0 / fps; }
  // Throws InvalidInput unless fps > 0, size() >= 3 and all values finite.
  void validate() const;
};

// [frames][kPoseChannels] flattening and its inverse.
std::vector<double> to_channels(const MotionSequence& motion);
void from_channels(std::span<const double> channels, MotionSequence& motion);

// Gait parameters of synth_walk. Angles in rad, frequencies in Hz.
struct GaitConfig {
  double stride_hz = 1.0;
  double hip_flexion_amp = 0.4;
  double knee_flexion_mean = 0.4;
  double knee_flexion_amp = 0.3;
  double knee_second_harmonic = 0.1;
  double ankle_amp = 0.15;
  double arm_swing_amp = 0.3;
  // Shoulder rotation bringing the arms down from the T-pose.
  double arm_drop = 1.3;
  double elbow_flexion_mean = 0.3;
  double elbow_flexion_amp = 0.1;
  double pelvis_twist_amp = 0.08;
  double spine_twist_amp = 0.03;  // per spine joint, counter to the pelvis
  double trunk_lean = 0.05;
  double walk_speed = 1.2;     // m/s along +z
  double vertical_bob = 0.02;  // m, at twice the stride frequency
};

// Procedural walk: every channel is a sum of sinusoids at the stride
// frequency and its second harmonic, so the content is band-limited and
// rotation channels are periodic in the stride.
MotionSequence synth_walk(double duration_s = 4.0, double fps = 30.0,
                          const GaitConfig& gait = {});

std::string motion_to_json(const MotionSequence& motion);
MotionSequence motion_from_json(std::string_view text);
MotionSequence load_motion(const std::filesystem::path& path);
void save_motion(const MotionSequence& motion,
                 const std::filesystem::path& path);

}  // namespace idyn

#endif  // IDYN_MOTION_HPP_
