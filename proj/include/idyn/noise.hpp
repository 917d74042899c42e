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

// Pose noise models: i.i.d. Gaussian on every axis-angle channel, and a
// joint-dependent anisotropic profile with temporal jitter that mimics
// monocular video estimators.
//
// Random numbers come from std::mt19937_64 (whose output sequence is fixed by
// the C++ standard) turned into normals by the Box-Muller transform
// implemented here, so a seed produces the same noise on every platform.

#ifndef IDYN_NOISE_HPP_
#define IDYN_NOISE_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>

#include "idyn/motion.hpp"

namespace idyn {

inline constexpr std::uint64_t kDefaultSeed = 42;

// Standard normal deviates from mt19937_64 via Box-Muller.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  double next();

 private:
  // Uniform in (0, 1) from the top 53 bits.
  double uniform_open();

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Adds sigma * N(0, 1) to each of the 72 rotation channels of every frame.
// Translation is untouched. Throws InvalidInput if sigma < 0.
MotionSequence add_uniform_noise(const MotionSequence& motion, double sigma,
                                 std::uint64_t seed);

// Adds sigma * N(0, 1) to the rotation channels of one joint only.
MotionSequence add_joint_noise(const MotionSequence& motion, int joint,
                               double sigma, std::uint64_t seed);

struct NoiseProfile {
  std::array<double, kNumJoints> sigma{};  // rad
  Vec3 depth_axis{0.0, 0.0, 1.0};          // unit, camera frame
  double depth_gain = 2.0;
  // Jitter amplitude as a multiple of the joint sigma.
  double jitter_gain = 0.5;
  std::uint64_t seed = kDefaultSeed;

  // Throws InvalidInput on negative sigmas, depth_gain < 1, jitter_gain < 0
  // or a non-unit depth axis.
  void validate() const;

  // Expected standard deviation of the added noise on one rotation channel.
  double channel_std(int joint, int axis) const;
  // sqrt of the mean over the 72 channels of channel_std^2: the sigma of
  // uniform noise with the same average variance.
  double matched_uniform_sigma() const;
};

// pelvis 0.02, spine 0.03, hips 0.04, knees 0.05, ankles/feet 0.06,
// shoulders/elbows 0.05, wrists/hands 0.07; depth gain 2.
NoiseProfile realistic_profile();

// Per joint j and frame t:
//   n = sigma_j * (e_perp + depth_gain * c_t d)             e ~ N(0, I3)
//   j = jitter_gain * sigma_j * (u_t - u_{t-1}) / 2         u ~ N(0, I3)
// where e_perp is e with its component along d removed. The depth deviate
// c_t ~ N(0, 1) and the jitter deviates u_t are drawn once per frame and
// shared by every joint, so depth error and flicker are coherent across
// the body. Each channel's variance is the same as for independent draws.
MotionSequence add_realistic_noise(const MotionSequence& motion,
                                   const NoiseProfile& profile);

std::string noise_profile_to_json(const NoiseProfile& profile);
NoiseProfile noise_profile_from_json(std::string_view text);
NoiseProfile load_noise_profile(const std::filesystem::path& path);

}  // namespace idyn

#endif  // IDYN_NOISE_HPP_
