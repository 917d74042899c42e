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

#include "idyn/motion.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace idyn {

void MotionSequence::validate() const {
  if (!(fps > 0.0) || !std::isfinite(fps)) {
    throw InvalidInput("motion: fps must be positive");
  }
  if (size() < 3) {
    throw InvalidInput("motion: need at least 3 frames, got " +
                       std::to_string(size()));
  }
  for (int t = 0; t < size(); ++t) {
    const Pose& p = frames[t];
    if (!is_finite(p.trans)) {
      throw InvalidInput("motion: non-finite root_trans at frame " +
                         std::to_string(t));
    }
    for (int j = 0; j < kNumJoints; ++j) {
      if (!is_finite(p.rot[j])) {
        throw InvalidInput("motion: non-finite pose at frame " +
                           std::to_string(t) + ", joint " +
                           std::string(kJointNames[j]));
      }
    }
  }
}

std::vector<double> to_channels(const MotionSequence& motion) {
  std::vector<double> out(static_cast<std::size_t>(motion.size()) *
                          kPoseChannels);
  for (int t = 0; t < motion.size(); ++t) {
    double* row = out.data() + static_cast<std::size_t>(t) * kPoseChannels;
    const Pose& p = motion.frames[t];
    for (int j = 0; j < kNumJoints; ++j) {
      row[3 * j] = p.rot[j].x;
      row[3 * j + 1] = p.rot[j].y;
      row[3 * j + 2] = p.rot[j].z;
    }
    row[kRotationChannels] = p.trans.x;
    row[kRotationChannels + 1] = p.trans.y;
    row[kRotationChannels + 2] = p.trans.z;
  }
  return out;
}

void from_channels(std::span<const double> channels, MotionSequence& motion) {
  if (channels.size() % kPoseChannels != 0) {
    throw InvalidInput("from_channels: size is not a multiple of 75");
  }
  const int frames = static_cast<int>(channels.size() / kPoseChannels);
  motion.frames.resize(frames);
  for (int t = 0; t < frames; ++t) {
    const double* row = channels.data() + static_cast<std::size_t>(t) * kPoseChannels;
    Pose& p = motion.frames[t];
    for (int j = 0; j < kNumJoints; ++j) {
      p.rot[j] = {row[3 * j], row[3 * j + 1], row[3 * j + 2]};
    }
    p.trans = {row[kRotationChannels], row[kRotationChannels + 1],
               row[kRotationChannels + 2]};
  }
}

MotionSequence synth_walk(double duration_s, double fps,
                          const GaitConfig& g) {
  if (!(duration_s > 0.0) || !(fps > 0.0)) {
    throw InvalidInput("synth_walk: duration and fps must be positive");
  }
  const int frames = static_cast<int>(std::lround(duration_s * fps));
  if (frames < 3) throw InvalidInput("synth_walk: fewer than 3 frames");
  MotionSequence m;
  m.fps = fps;
  m.frames.resize(frames);
  const double pi = std::numbers::pi;
  for (int k = 0; k < frames; ++k) {
    const double t = k / fps;
    const double phase = 2.0 * pi * g.stride_hz * t;
    Pose& p = m.frames[k];

    p.rot[kPelvis] = {0.0, g.pelvis_twist_amp * std::sin(phase), 0.0};
    p.rot[kSpine1] = {g.trunk_lean, -g.spine_twist_amp * std::sin(phase), 0.0};
    p.rot[kSpine2] = {0.0, -g.spine_twist_amp * std::sin(phase), 0.0};
    p.rot[kSpine3] = {0.0, -g.spine_twist_amp * std::sin(phase), 0.0};

    // Left and right limbs are half a stride apart.
    for (int side = 0; side < 2; ++side) {
      const double ph = phase + side * pi;
      const double sign = side == 0 ? 1.0 : -1.0;  // mirror for lateral axes
      // Negative x rotation swings the leg forward.
      p.rot[kLeftHip + side] = {-g.hip_flexion_amp * std::sin(ph), 0.0, 0.0};
      p.rot[kLeftKnee + side] = {
          g.knee_flexion_mean - g.knee_flexion_amp * std::cos(ph) +
              g.knee_second_harmonic * std::sin(2.0 * ph),
          0.0, 0.0};
      p.rot[kLeftAnkle + side] = {g.ankle_amp * std::sin(ph + 0.5 * pi), 0.0,
                                  0.0};
      // Arms swing against the leg on the same side.
      p.rot[kLeftShoulder + side] = {g.arm_swing_amp * std::sin(ph), 0.0,
                                     -sign * g.arm_drop};
      p.rot[kLeftElbow + side] = {
          0.0,
          -sign * (g.elbow_flexion_mean +
                   g.elbow_flexion_amp * std::sin(ph)),
          0.0};
    }
    p.trans = {0.0, g.vertical_bob * std::sin(2.0 * phase),
               g.walk_speed * t};
  }
  return m;
}

std::string motion_to_json(const MotionSequence& motion) {
  nlohmann::json j;
  j["fps"] = motion.fps;
  auto frames = nlohmann::json::array();
  for (const Pose& p : motion.frames) {
    nlohmann::json f;
    f["root_trans"] = {p.trans.x, p.trans.y, p.trans.z};
    auto pose = nlohmann::json::array();
    for (const Vec3& r : p.rot) pose.push_back({r.x, r.y, r.z});
    f["pose"] = std::move(pose);
    frames.push_back(std::move(f));
  }
  j["frames"] = std::move(frames);
  return j.dump();
}

namespace {

double finite_number(const nlohmann::json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ParseError(where + ": non-finite value");
  return d;
}

Vec3 vec3_at(const nlohmann::json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) {
    throw ParseError(where + ": expected 3 numbers");
  }
  return {finite_number(v[0], where), finite_number(v[1], where),
          finite_number(v[2], where)};
}

}  // namespace

MotionSequence motion_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("motion: malformed JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("fps") || !j.contains("frames")) {
    throw ParseError("motion: expected an object with 'fps' and 'frames'");
  }
  MotionSequence m;
  m.fps = finite_number(j["fps"], "motion.fps");
  if (!(m.fps > 0.0)) throw ParseError("motion: fps must be positive");
  const auto& frames = j["frames"];
  if (!frames.is_array()) throw ParseError("motion: 'frames' must be an array");
  m.frames.resize(frames.size());
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const std::string where = "motion: frame " + std::to_string(t);
    const auto& f = frames[t];
    if (!f.is_object() || !f.contains("pose") || !f.contains("root_trans")) {
      throw ParseError(where + ": expected 'pose' and 'root_trans'");
    }
    const auto& pose = f["pose"];
    if (!pose.is_array() || pose.size() != kNumJoints) {
      throw ParseError(where + ": expected 24 pose entries, got " +
                       std::to_string(pose.is_array() ? pose.size() : 0));
    }
    m.frames[t].trans = vec3_at(f["root_trans"], where + " root_trans");
    for (int k = 0; k < kNumJoints; ++k) {
      m.frames[t].rot[k] =
          vec3_at(pose[k], where + " joint " + std::string(kJointNames[k]));
    }
  }
  if (m.size() < 3) {
    throw ParseError("motion: need at least 3 frames, got " +
                     std::to_string(m.size()));
  }
  return m;
}

MotionSequence load_motion(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open motion file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return motion_from_json(buf.str());
}

void save_motion(const MotionSequence& motion,
                 const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write motion file " + path.string());
  out << motion_to_json(motion) << '\n';
}

}  // namespace idyn
