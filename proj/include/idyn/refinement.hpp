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

// Physics-based pose refinement: Adam on a loss that penalises torque
// jerkiness, torques above a limit, and distance from the observed poses.
//
//   L = ls * mean_tj |tau(t+1) - 2 tau(t) + tau(t-1)|
//     + lm * mean_tj relu(|tau(t)| - tau_max)
//     + lr * mean_tk |theta_hat(t, k) - theta_obs(t, k)|
//
// The first two means run over interior frames and all joints. The last
// runs over all frames and the 25 three-vectors of a pose (24 rotations
// plus the root translation). The torque second difference is per frame
// squared (not divided by dt^2), which keeps the three weights on
// comparable scales at any frame rate.

#ifndef IDYN_REFINEMENT_HPP_
#define IDYN_REFINEMENT_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "idyn/autodiff.hpp"
#include "idyn/filtering.hpp"
#include "idyn/motion.hpp"
#include "idyn/rnea.hpp"
#include "idyn/segment_params.hpp"

namespace idyn {

struct RefinementConfig {
  double lambda_smooth = 10.0;
  double lambda_magnitude = 1.0;
  double lambda_reg = 5.0;
  double tau_max = 100.0;  // Nm
  int iterations = 200;
  // Small enough that the loss falls on practically every step.
  double step_size = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  bool freeze_translation = false;
  // When > 0, the optimised poses pass through the zero-phase low-pass
  // filter (inside the differentiable path) before the dynamics.
  double filter_cutoff_hz = 0.0;
  DynamicsMode mode = DynamicsMode::kPaperFaithful;

  // Throws ConfigError on negative weights, iterations < 1, or invalid
  // Adam parameters.
  void validate() const;
};

template <class T>
struct LossTermsT {
  T smooth{}, magnitude{}, reg{}, total{};
};
using LossTerms = LossTermsT<double>;

namespace detail {

// Euclidean norm with a zero subgradient at the origin.
template <class T>
T safe_norm(const Vec3T<T>& v) {
  const T s = dot(v, v);
  if (value_of(s) <= 0.0) return T(0.0);
  return sqrt(s);
}

template <class T>
std::vector<PoseT<T>> filter_poses(std::span<const PoseT<T>> poses,
                                   const IirCoeffs& c) {
  const std::size_t n = poses.size();
  std::vector<PoseT<T>> out(poses.begin(), poses.end());
  std::vector<T> col(n);
  auto run = [&](auto&& get) {
    for (std::size_t t = 0; t < n; ++t) col[t] = get(poses[t]);
    const std::vector<T> f = filtfilt<T>(std::span<const T>(col), c);
    for (std::size_t t = 0; t < n; ++t) get(out[t]) = f[t];
  };
  for (int j = 0; j < kNumJoints; ++j) {
    run([j](auto& p) -> auto& { return p.rot[j].x; });
    run([j](auto& p) -> auto& { return p.rot[j].y; });
    run([j](auto& p) -> auto& { return p.rot[j].z; });
  }
  run([](auto& p) -> auto& { return p.trans.x; });
  run([](auto& p) -> auto& { return p.trans.y; });
  run([](auto& p) -> auto& { return p.trans.z; });
  return out;
}

}  // namespace detail

// Smoothness and magnitude terms from joint torques.
template <class T>
void torque_terms(const DynamicsResultT<T>& dyn, const RefinementConfig& cfg,
                  LossTermsT<T>& terms) {
  const int first = kBoundaryFrames;
  const int last = dyn.frames - kBoundaryFrames;  // exclusive
  if (last - first < 1) {
    throw SequenceTooShort("physics loss: no interior frames");
  }
  T smooth(0.0), magnitude(0.0);
  for (int t = first; t < last; ++t) {
    for (int j = 0; j < kNumJoints; ++j) {
      const Vec3T<T>& tau = dyn.torque[dyn.at(t, j)];
      const Vec3T<T> jerk = (dyn.torque[dyn.at(t + 1, j)] - T(2.0) * tau) +
                            dyn.torque[dyn.at(t - 1, j)];
      smooth += detail::safe_norm(jerk);
      magnitude += relu(detail::safe_norm(tau) - T(cfg.tau_max));
    }
  }
  const double count = static_cast<double>(last - first) * kNumJoints;
  terms.smooth = smooth / T(count);
  terms.magnitude = magnitude / T(count);
}

// The loss for candidate poses hat against observed poses obs.
template <class T>
LossTermsT<T> physics_loss(const Skeleton& skel, const BodySegments& segs,
                           std::span<const PoseT<T>> hat,
                           std::span<const Pose> obs, double fps,
                           const RefinementConfig& cfg) {
  if (hat.size() != obs.size()) {
    throw InvalidInput("physics loss: candidate and observed lengths differ");
  }
  LossTermsT<T> terms;
  if (cfg.filter_cutoff_hz > 0.0) {
    const IirCoeffs c = butterworth_coeffs({cfg.filter_cutoff_hz, fps});
    const std::vector<PoseT<T>> filtered = detail::filter_poses<T>(hat, c);
    torque_terms(dynamics_from_poses<T>(skel, segs, filtered, fps, cfg.mode),
                 cfg, terms);
  } else {
    torque_terms(dynamics_from_poses<T>(skel, segs, hat, fps, cfg.mode), cfg,
                 terms);
  }
  T reg(0.0);
  for (std::size_t t = 0; t < hat.size(); ++t) {
    for (int j = 0; j < kNumJoints; ++j) {
      reg += detail::safe_norm(hat[t].rot[j] - lift<T>(obs[t].rot[j]));
    }
    reg += detail::safe_norm(hat[t].trans - lift<T>(obs[t].trans));
  }
  terms.reg = reg / T(static_cast<double>(hat.size()) * (kNumJoints + 1));
  terms.total = T(cfg.lambda_smooth) * terms.smooth +
                T(cfg.lambda_magnitude) * terms.magnitude +
                T(cfg.lambda_reg) * terms.reg;
  return terms;
}

// RMS over the 72 rotation channels and the interior frames.
double pose_error(const MotionSequence& motion,
                  const MotionSequence& reference,
                  int exclude_boundary = kBoundaryFrames);

// Torque norm of one joint at every interior frame.
std::vector<double> joint_torque_norms(const DynamicsResult& dyn, int joint,
                                       int exclude_boundary = kBoundaryFrames);

struct RefinementReport {
  RefinementConfig config;
  int frames = 0;
  double fps = 0.0;
  // loss[k] is the loss after k Adam steps; size iterations + 1.
  std::vector<LossTerms> loss;
  // Filled when a clean reference is given.
  bool has_reference = false;
  double initial_torque_error = 0.0, final_torque_error = 0.0;  // Nm
  double initial_pose_error = 0.0, final_pose_error = 0.0;      // rad
  // Left hip torque norms over interior frames (clean empty without a
  // reference).
  std::vector<double> hip_clean, hip_noisy, hip_refined;

  double torque_reduction() const;   // 1 - final / initial
  double pose_error_change() const;  // final / initial - 1
};

struct RefinementResult {
  MotionSequence motion;
  RefinementReport report;
};

// Runs Adam from the observed poses. Throws ComputationError naming the
// iteration if the loss or a gradient becomes non-finite, and
// SequenceTooShort for fewer than 5 frames.
RefinementResult refine(const Skeleton& skel, const BodySegments& segs,
                        const MotionSequence& observed,
                        const RefinementConfig& config = {},
                        const std::optional<MotionSequence>& clean = {});

std::string report_to_json(const RefinementReport& report);
// frame,clean_nm,noisy_nm,refined_nm
std::string hip_torque_csv(const RefinementReport& report);

}  // namespace idyn

#endif  // IDYN_REFINEMENT_HPP_
