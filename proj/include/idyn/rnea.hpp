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

// Recursive Newton-Euler inverse dynamics over the joint tree.
//
// Joints are visited from the highest index down, so every child is done
// before its parent (parent[i] < i). Per frame and joint:
//
//   f_i   = m_i (a_i - g) + sum_j f_j
//   tau_i = I_i alpha_i + w_i x (I_i w_i) + sum_j (tau_j + r_j x f_j)
//
// with r_j = p_j - p_i and I_i = R_i I_local R_i^T. In kPaperFaithful mode
// a_i is the acceleration of the joint position itself. kComCorrected uses the
// segment centre-of-mass acceleration instead and adds the moment
// c_i x m_i (a_com - g) of the segment's own load, c_i = R_i com_offset_i.
// Everything is in the world frame.

#ifndef IDYN_RNEA_HPP_
#define IDYN_RNEA_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "idyn/derivatives.hpp"
#include "idyn/segment_params.hpp"

namespace idyn {

enum class DynamicsMode { kPaperFaithful, kComCorrected };

template <class T>
struct DynamicsResultT {
  int frames = 0;
  std::vector<Vec3T<T>> force;   // N, [frames][24]
  std::vector<Vec3T<T>> torque;  // Nm, [frames][24]

  std::size_t at(int t, int j) const {
    return static_cast<std::size_t>(t) * kNumJoints + j;
  }
};
using DynamicsResult = DynamicsResultT<double>;

template <class T>
DynamicsResultT<T> inverse_dynamics(
    const Skeleton& skel, const BodySegments& segs,
    const KinematicStateT<T>& kin,
    DynamicsMode mode = DynamicsMode::kPaperFaithful) {
  const std::size_t n = static_cast<std::size_t>(kin.frames) * kNumJoints;
  if (kin.joints != kNumJoints || kin.pos.size() != n || kin.acc.size() != n ||
      kin.rot.size() != n || kin.ang_vel.size() != n ||
      kin.ang_acc.size() != n) {
    throw InvalidInput("inverse_dynamics: kinematic state dimension mismatch");
  }
  const Vec3T<T> g = lift<T>(kGravity);

  // Lever arms and accelerations of the segment centres of mass.
  std::vector<Vec3T<T>> com_lever, com_acc;
  if (mode == DynamicsMode::kComCorrected) {
    com_lever.resize(n);
    std::vector<Vec3T<T>> com_pos(n), com_vel;
    for (int t = 0; t < kin.frames; ++t) {
      for (int j = 0; j < kNumJoints; ++j) {
        const std::size_t i = kin.at(t, j);
        com_lever[i] = kin.rot[i] * lift<T>(segs.segment[j].com_offset);
        com_pos[i] = kin.pos[i] + com_lever[i];
      }
    }
    linear_derivatives<T>(com_pos, kin.frames, kNumJoints, kin.dt, com_vel,
                          com_acc);
  }

  DynamicsResultT<T> out;
  out.frames = kin.frames;
  out.force.assign(n, Vec3T<T>{});
  out.torque.assign(n, Vec3T<T>{});
  for (int t = 0; t < kin.frames; ++t) {
    for (int j = kNumJoints - 1; j >= 0; --j) {
      const std::size_t i = kin.at(t, j);
      const SegmentParams& seg = segs.segment[j];
      const Mat3T<T>& r = kin.rot[i];
      const Vec3T<T>& w = kin.ang_vel[i];
      const Vec3& d = seg.inertia_diag;

      // I w and I alpha via the local frame: R (I_local (R^T v)).
      auto inertia_times = [&](const Vec3T<T>& v) {
        const Vec3T<T> local{
            r(0, 0) * v.x + r(1, 0) * v.y + r(2, 0) * v.z,
            r(0, 1) * v.x + r(1, 1) * v.y + r(2, 1) * v.z,
            r(0, 2) * v.x + r(1, 2) * v.y + r(2, 2) * v.z};
        return r * Vec3T<T>{local.x * d.x, local.y * d.y, local.z * d.z};
      };

      const Vec3T<T> lin_acc =
          mode == DynamicsMode::kComCorrected ? com_acc[i] : kin.acc[i];
      Vec3T<T> f = (lin_acc - g) * seg.mass;
      Vec3T<T> tau = inertia_times(kin.ang_acc[i]) + cross(w, inertia_times(w));
      if (mode == DynamicsMode::kComCorrected) {
        tau += cross(com_lever[i], f);
      }
      for (int c = j + 1; c < kNumJoints; ++c) {
        if (skel.parent[c] != j) continue;
        const std::size_t ic = kin.at(t, c);
        const Vec3T<T> lever = kin.pos[ic] - kin.pos[i];
        f += out.force[ic];
        tau += out.torque[ic] + cross(lever, out.force[ic]);
      }
      out.force[i] = f;
      out.torque[i] = tau;
    }
  }
  return out;
}

// Poses -> FK -> derivatives -> RNEA.
template <class T>
DynamicsResultT<T> dynamics_from_poses(
    const Skeleton& skel, const BodySegments& segs,
    std::span<const PoseT<T>> poses, double fps,
    DynamicsMode mode = DynamicsMode::kPaperFaithful) {
  if (!(fps > 0.0)) throw InvalidInput("fps must be positive");
  const KinematicStateT<T> kin = kinematic_state<T>(skel, poses, 1.0 / fps);
  return inverse_dynamics<T>(skel, segs, kin, mode);
}

// Mean over frames [exclude_boundary, T - exclude_boundary) and all joints of
// |tau - tau_ref|, Nm.
double torque_error(const DynamicsResult& result,
                    const DynamicsResult& reference,
                    int exclude_boundary = kBoundaryFrames);

// Mean over the same frames of |tau_j - tau_ref_j|, per joint.
std::vector<double> per_joint_torque_error(
    const DynamicsResult& result, const DynamicsResult& reference,
    int exclude_boundary = kBoundaryFrames);

// CSV with header frame,joint_name,fx,fy,fz,tx,ty,tz; one row per joint for
// frames [exclude_boundary, T - exclude_boundary).
std::string dynamics_to_csv(const DynamicsResult& result,
                            int exclude_boundary = kBoundaryFrames);
void save_dynamics_csv(const DynamicsResult& result,
                       const std::filesystem::path& path,
                       int exclude_boundary = kBoundaryFrames);

}  // namespace idyn

#endif  // IDYN_RNEA_HPP_
