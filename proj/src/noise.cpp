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

#include "idyn/noise.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace idyn {

double NormalStream::uniform_open() {
  // (k + 0.5) / 2^53 for k in [0, 2^53).
  const std::uint64_t k = engine_() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform_open();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

MotionSequence add_uniform_noise(const MotionSequence& motion, double sigma,
                                 std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw InvalidInput("add_uniform_noise: sigma must be >= 0");
  }
  MotionSequence out = motion;
  if (sigma == 0.0) return out;
  NormalStream rng(seed);
  for (Pose& p : out.frames) {
    for (Vec3& r : p.rot) {
      r.x += sigma * rng.next();
      r.y += sigma * rng.next();
      r.z += sigma * rng.next();
    }
  }
  return out;
}

MotionSequence add_joint_noise(const MotionSequence& motion, int joint,
                               double sigma, std::uint64_t seed) {
  if (joint < 0 || joint >= kNumJoints) {
    throw InvalidInput("add_joint_noise: joint index out of range");
  }
  if (!(sigma >= 0.0)) throw InvalidInput("add_joint_noise: sigma must be >= 0");
  MotionSequence out = motion;
  NormalStream rng(seed);
  for (Pose& p : out.frames) {
    Vec3& r = p.rot[joint];
    r.x += sigma * rng.next();
    r.y += sigma * rng.next();
    r.z += sigma * rng.next();
  }
  return out;
}

void NoiseProfile::validate() const {
  for (double s : sigma) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw InvalidInput("noise profile: sigmas must be finite and >= 0");
    }
  }
  if (!(depth_gain >= 1.0)) {
    throw InvalidInput("noise profile: depth_gain must be >= 1");
  }
  if (!(jitter_gain >= 0.0)) {
    throw InvalidInput("noise profile: jitter_gain must be >= 0");
  }
  if (!is_finite(depth_axis) || std::abs(norm(depth_axis) - 1.0) > 1e-9) {
    throw InvalidInput("noise profile: depth_axis must be a unit vector");
  }
}

double NoiseProfile::channel_std(int joint, int axis) const {
  const double d = depth_axis[axis];
  // Var of (e + (g - 1)(e.d) d)_k = 1 + (g^2 - 1) d_k^2.
  const double base = 1.0 + (depth_gain * depth_gain - 1.0) * d * d;
  // Var of (u_t - u_{t-1}) / 2 = 1/2.
  const double jitter = 0.5 * jitter_gain * jitter_gain;
  return sigma[joint] * std::sqrt(base + jitter);
}

double NoiseProfile::matched_uniform_sigma() const {
  double sum = 0.0;
  for (int j = 0; j < kNumJoints; ++j) {
    for (int k = 0; k < 3; ++k) sum += std::pow(channel_std(j, k), 2);
  }
  return std::sqrt(sum / kRotationChannels);
}

NoiseProfile realistic_profile() {
  NoiseProfile p;
  auto set = [&](std::initializer_list<int> joints, double s) {
    for (int j : joints) p.sigma[j] = s;
  };
  set({kPelvis}, 0.02);
  set({kSpine1, kSpine2, kSpine3, kNeck}, 0.03);
  set({kLeftHip, kRightHip, kLeftCollar, kRightCollar, kHead}, 0.04);
  set({kLeftKnee, kRightKnee}, 0.05);
  set({kLeftAnkle, kRightAnkle, kLeftFoot, kRightFoot}, 0.06);
  set({kLeftShoulder, kRightShoulder, kLeftElbow, kRightElbow}, 0.05);
  set({kLeftWrist, kRightWrist, kLeftHand, kRightHand}, 0.07);
  p.depth_axis = {0.0, 0.0, 1.0};
  p.depth_gain = 2.0;
  p.jitter_gain = 0.5;
  p.seed = kDefaultSeed;
  return p;
}

MotionSequence add_realistic_noise(const MotionSequence& motion,
                                   const NoiseProfile& profile) {
  profile.validate();
  MotionSequence out = motion;
  NormalStream rng(profile.seed);
  const Vec3 d = profile.depth_axis;
  auto draw = [&rng] { return Vec3{rng.next(), rng.next(), rng.next()}; };
  Vec3 prev = draw();
  for (Pose& p : out.frames) {
    // One depth deviate and one jitter deviate per frame, shared by all
    // joints: a monocular estimator misjudges depth and flickers for the
    // whole body at once, not joint by joint.
    const double depth = rng.next();
    const Vec3 u = draw();
    const Vec3 jitter = (0.5 * profile.jitter_gain) * (u - prev);
    prev = u;
    for (int j = 0; j < kNumJoints; ++j) {
      const Vec3 e = draw();
      const Vec3 white = (e - dot(e, d) * d) + (profile.depth_gain * depth) * d;
      p.rot[j] += profile.sigma[j] * (white + jitter);
    }
  }
  return out;
}

std::string noise_profile_to_json(const NoiseProfile& p) {
  nlohmann::json j;
  nlohmann::json sig = nlohmann::json::object();
  for (int k = 0; k < kNumJoints; ++k) {
    sig[std::string(kJointNames[k])] = p.sigma[k];
  }
  j["sigma"] = sig;
  j["depth_axis"] = {p.depth_axis.x, p.depth_axis.y, p.depth_axis.z};
  j["depth_gain"] = p.depth_gain;
  j["jitter_gain"] = p.jitter_gain;
  j["seed"] = p.seed;
  return j.dump(2);
}

NoiseProfile noise_profile_from_json(std::string_view text) {
  NoiseProfile p = realistic_profile();
  try {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object()) throw ParseError("noise profile: expected an object");
    if (j.contains("sigma")) {
      for (const auto& [name, v] : j["sigma"].items()) {
        const int idx = joint_index(name);
        if (idx < 0) throw ParseError("noise profile: unknown joint " + name);
        p.sigma[idx] = v.get<double>();
      }
    }
    if (j.contains("depth_axis")) {
      const auto& a = j["depth_axis"];
      if (a.size() != 3) throw ParseError("noise profile: depth_axis needs 3");
      p.depth_axis = {a[0].get<double>(), a[1].get<double>(),
                      a[2].get<double>()};
    }
    if (j.contains("depth_gain")) p.depth_gain = j["depth_gain"].get<double>();
    if (j.contains("jitter_gain")) {
      p.jitter_gain = j["jitter_gain"].get<double>();
    }
    if (j.contains("seed")) p.seed = j["seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("noise profile: ") + e.what());
  }
  try {
    p.validate();
  } catch (const InvalidInput& e) {
    throw ParseError(e.what());
  }
  return p;
}

NoiseProfile load_noise_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open noise profile " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return noise_profile_from_json(buf.str());
}

}  // namespace idyn
