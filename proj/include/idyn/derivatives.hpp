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

// Velocities and accelerations of joint trajectories by central finite
// differences, and angular rates from consecutive rotations through the
// matrix logarithm.
//
// Boundary policy: frames 0 and T-1 copy the derivative of the nearest
// interior frame. Error metrics downstream skip kBoundaryFrames frames at each
// end, which also covers frames whose angular acceleration reads a copied
// angular velocity.

#ifndef IDYN_DERIVATIVES_HPP_
#define IDYN_DERIVATIVES_HPP_

#include <cmath>
#include <span>
#include <vector>

#include "idyn/error.hpp"
#include "idyn/rotations.hpp"
#include "idyn/simd/kernels.hpp"
#include "idyn/skeleton.hpp"

namespace idyn {

// Frames excluded at each end of a sequence by every error metric.
inline constexpr int kBoundaryFrames = 2;

// Per-frame, per-joint kinematics; index with at(t, j).
template <class T>
struct KinematicStateT {
  int frames = 0;
  int joints = kNumJoints;
  double dt = 0.0;
  std::vector<Vec3T<T>> pos, vel, acc;
  std::vector<Mat3T<T>> rot;
  std::vector<Vec3T<T>> ang_vel, ang_acc;  // world frame

  std::size_t at(int t, int j) const {
    return static_cast<std::size_t>(t) * joints + j;
  }
};
using KinematicState = KinematicStateT<double>;

namespace detail {

inline void check_sequence(int frames, double dt) {
  if (frames < 3) {
    throw SequenceTooShort("finite differences need at least 3 frames, got " +
                           std::to_string(frames));
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw InvalidInput("time step must be positive");
  }
}

template <class T>
void copy_boundaries(std::vector<T>& v, int frames, int width) {
  for (int k = 0; k < width; ++k) {
    v[k] = v[width + k];
    v[static_cast<std::size_t>(frames - 1) * width + k] =
        v[static_cast<std::size_t>(frames - 2) * width + k];
  }
}

}  // namespace detail

// Central differences of a [frames][width] series of 3-vectors.
template <class T>
void linear_derivatives(std::span<const Vec3T<T>> pos, int frames, int width,
                        double dt, std::vector<Vec3T<T>>& vel,
                        std::vector<Vec3T<T>>& acc) {
  detail::check_sequence(frames, dt);
  if (pos.size() != static_cast<std::size_t>(frames) * width) {
    throw InvalidInput("linear_derivatives: size mismatch");
  }
  vel.assign(pos.size(), Vec3T<T>{});
  acc.assign(pos.size(), Vec3T<T>{});
  if constexpr (std::is_same_v<T, double>) {
    simd::kernels().central_differences(
        reinterpret_cast<const double*>(pos.data()), frames, 3 * width, dt,
        reinterpret_cast<double*>(vel.data()),
        reinterpret_cast<double*>(acc.data()));
  } else {
    const double half_inv_dt = 0.5 / dt;
    const double inv_dt2 = 1.0 / (dt * dt);
    for (int t = 1; t + 1 < frames; ++t) {
      for (int j = 0; j < width; ++j) {
        const std::size_t i = static_cast<std::size_t>(t) * width + j;
        const Vec3T<T>& prev = pos[i - width];
        const Vec3T<T>& cur = pos[i];
        const Vec3T<T>& next = pos[i + width];
        for (int k = 0; k < 3; ++k) {
          vel[i][k] = (next[k] - prev[k]) * half_inv_dt;
          acc[i][k] = ((next[k] - 2.0 * cur[k]) + prev[k]) * inv_dt2;
        }
      }
    }
  }
  detail::copy_boundaries(vel, frames, width);
  detail::copy_boundaries(acc, frames, width);
}

// omega(t) = R(t) * log(R(t-1)^T R(t+1)) / (2 dt), expressed in the world
// frame; alpha is the central difference of omega.
template <class T>
void angular_derivatives(std::span<const Mat3T<T>> rot, int frames, int width,
                         double dt, std::vector<Vec3T<T>>& ang_vel,
                         std::vector<Vec3T<T>>& ang_acc) {
  detail::check_sequence(frames, dt);
  if (rot.size() != static_cast<std::size_t>(frames) * width) {
    throw InvalidInput("angular_derivatives: size mismatch");
  }
  ang_vel.assign(rot.size(), Vec3T<T>{});
  ang_acc.assign(rot.size(), Vec3T<T>{});
  const double half_inv_dt = 0.5 / dt;
  for (int t = 1; t + 1 < frames; ++t) {
    for (int j = 0; j < width; ++j) {
      const std::size_t i = static_cast<std::size_t>(t) * width + j;
      const Mat3T<T> rel = transpose_times(rot[i - width], rot[i + width]);
      ang_vel[i] = rot[i] * (mat_log(rel) * half_inv_dt);
    }
  }
  detail::copy_boundaries(ang_vel, frames, width);
  for (int t = 1; t + 1 < frames; ++t) {
    for (int j = 0; j < width; ++j) {
      const std::size_t i = static_cast<std::size_t>(t) * width + j;
      for (int k = 0; k < 3; ++k) {
        ang_acc[i][k] = (ang_vel[i + width][k] - ang_vel[i - width][k]) *
                        half_inv_dt;
      }
    }
  }
  detail::copy_boundaries(ang_acc, frames, width);
}

// Forward kinematics of every frame followed by all derivatives.
template <class T>
KinematicStateT<T> kinematic_state(const Skeleton& skel,
                                   std::span<const PoseT<T>> poses,
                                   double dt) {
  const int frames = static_cast<int>(poses.size());
  detail::check_sequence(frames, dt);
  KinematicStateT<T> ks;
  ks.frames = frames;
  ks.dt = dt;
  ks.pos.resize(static_cast<std::size_t>(frames) * kNumJoints);
  ks.rot.resize(ks.pos.size());
  for (int t = 0; t < frames; ++t) {
    const FrameKinematicsT<T> fk = forward_kinematics(skel, poses[t]);
    for (int j = 0; j < kNumJoints; ++j) {
      ks.pos[ks.at(t, j)] = fk.world_pos[j];
      ks.rot[ks.at(t, j)] = fk.world_rot[j];
    }
  }
  linear_derivatives<T>(ks.pos, frames, kNumJoints, dt, ks.vel, ks.acc);
  angular_derivatives<T>(ks.rot, frames, kNumJoints, dt, ks.ang_vel,
                         ks.ang_acc);
  return ks;
}

// White-noise standard-deviation gain of the second-difference operator:
// |(1, -2, 1)| / dt^2 = sqrt(6) / dt^2.
inline double amplification_gain(double dt) {
  if (!(dt > 0.0)) throw InvalidInput("amplification_gain: dt must be > 0");
  return std::sqrt(6.0) / (dt * dt);
}

}  // namespace idyn

#endif  // IDYN_DERIVATIVES_HPP_
