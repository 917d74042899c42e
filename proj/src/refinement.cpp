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

#include "idyn/refinement.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

namespace idyn {

namespace {

std::vector<ad::Var> make_variables(ad::Tape& tape,
                                    std::span<const double> x) {
  std::vector<ad::Var> v;
  v.reserve(x.size());
  for (double d : x) v.push_back(tape.variable(d));
  return v;
}

template <class T>
std::vector<PoseT<T>> poses_from(std::span<const T> x) {
  const std::size_t frames = x.size() / kPoseChannels;
  std::vector<PoseT<T>> poses(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    const T* row = x.data() + t * kPoseChannels;
    for (int j = 0; j < kNumJoints; ++j) {
      poses[t].rot[j] = {row[3 * j], row[3 * j + 1], row[3 * j + 2]};
    }
    poses[t].trans = {row[kRotationChannels], row[kRotationChannels + 1],
                      row[kRotationChannels + 2]};
  }
  return poses;
}

LossTerms values_of(const LossTermsT<ad::Var>& t) {
  return {t.smooth.value(), t.magnitude.value(), t.reg.value(),
          t.total.value()};
}

}  // namespace

void RefinementConfig::validate() const {
  if (!(lambda_smooth >= 0.0) || !(lambda_magnitude >= 0.0) ||
      !(lambda_reg >= 0.0)) {
    throw ConfigError("refinement: loss weights must be >= 0");
  }
  if (!(tau_max >= 0.0)) throw ConfigError("refinement: tau_max must be >= 0");
  if (iterations < 1) throw ConfigError("refinement: iterations must be >= 1");
  if (!(step_size > 0.0)) throw ConfigError("refinement: step_size must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("refinement: Adam decay rates must be in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw ConfigError("refinement: epsilon must be > 0");
  if (!(filter_cutoff_hz >= 0.0)) {
    throw ConfigError("refinement: filter_cutoff_hz must be >= 0");
  }
}

double pose_error(const MotionSequence& motion,
                  const MotionSequence& reference, int exclude_boundary) {
  if (motion.size() != reference.size()) {
    throw InvalidInput("pose_error: frame counts differ");
  }
  const int first = exclude_boundary;
  const int last = motion.size() - exclude_boundary;
  if (exclude_boundary < 0 || last - first < 1) {
    throw SequenceTooShort("pose_error: no interior frames");
  }
  double ss = 0.0;
  for (int t = first; t < last; ++t) {
    for (int j = 0; j < kNumJoints; ++j) {
      const Vec3 d = motion.frames[t].rot[j] - reference.frames[t].rot[j];
      ss += dot(d, d);
    }
  }
  return std::sqrt(ss / (static_cast<double>(last - first) * kRotationChannels));
}

std::vector<double> joint_torque_norms(const DynamicsResult& dyn, int joint,
                                       int exclude_boundary) {
  if (joint < 0 || joint >= kNumJoints) {
    throw InvalidInput("joint_torque_norms: joint index out of range");
  }
  std::vector<double> out;
  for (int t = exclude_boundary; t < dyn.frames - exclude_boundary; ++t) {
    out.push_back(norm(dyn.torque[dyn.at(t, joint)]));
  }
  return out;
}

double RefinementReport::torque_reduction() const {
  if (initial_torque_error == 0.0) return 0.0;
  return 1.0 - final_torque_error / initial_torque_error;
}

double RefinementReport::pose_error_change() const {
  if (initial_pose_error == 0.0) return 0.0;
  return final_pose_error / initial_pose_error - 1.0;
}

RefinementResult refine(const Skeleton& skel, const BodySegments& segs,
                        const MotionSequence& observed,
                        const RefinementConfig& config,
                        const std::optional<MotionSequence>& clean) {
  config.validate();
  observed.validate();
  if (observed.size() < 5) {
    throw SequenceTooShort("refine: need at least 5 frames, got " +
                           std::to_string(observed.size()));
  }
  if (clean && clean->size() != observed.size()) {
    throw InvalidInput("refine: clean reference has " +
                       std::to_string(clean->size()) + " frames, input has " +
                       std::to_string(observed.size()));
  }
  const double fps = observed.fps;
  const std::span<const Pose> obs(observed.frames);
  std::vector<double> x = to_channels(observed);
  const std::size_t n = x.size();
  std::vector<double> m(n, 0.0), v(n, 0.0);

  RefinementReport report;
  report.config = config;
  report.frames = observed.size();
  report.fps = fps;
  report.loss.reserve(config.iterations + 1);

  ad::Tape tape;
  std::size_t tape_size = 0;
  for (int k = 0; k < config.iterations; ++k) {
    tape.clear();
    tape.reserve(tape_size);
    ad::Tape::Scope scope(tape);
    const std::vector<ad::Var> vars = make_variables(tape, x);
    const std::vector<PoseT<ad::Var>> hat =
        poses_from<ad::Var>(std::span<const ad::Var>(vars));
    LossTermsT<ad::Var> loss;
    try {
      loss = physics_loss<ad::Var>(
          skel, segs, std::span<const PoseT<ad::Var>>(hat), obs, fps, config);
    } catch (const InvalidInput& e) {
      // Only reachable once the iterate has left the valid domain.
      throw ComputationError("refine: diverged at iteration " +
                             std::to_string(k) + ": " + e.what());
    }
    tape_size = tape.size();
    report.loss.push_back(values_of(loss));
    if (!std::isfinite(loss.total.value())) {
      throw ComputationError("refine: loss is not finite at iteration " +
                             std::to_string(k));
    }
    const ad::Gradient grad = tape.backward(loss.total);
    const double c1 = 1.0 - std::pow(config.beta1, k + 1);
    const double c2 = 1.0 - std::pow(config.beta2, k + 1);
    for (std::size_t i = 0; i < n; ++i) {
      if (config.freeze_translation &&
          i % kPoseChannels >= static_cast<std::size_t>(kRotationChannels)) {
        continue;
      }
      const double g = grad.wrt(vars[i]);
      if (!std::isfinite(g)) {
        throw ComputationError("refine: non-finite gradient at iteration " +
                               std::to_string(k));
      }
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g;
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g * g;
      x[i] -= config.step_size * (m[i] / c1) /
              (std::sqrt(v[i] / c2) + config.epsilon);
    }
  }

  RefinementResult out;
  out.motion.fps = fps;
  from_channels(x, out.motion);
  LossTerms last;
  try {
    last = physics_loss<double>(skel, segs,
                                std::span<const Pose>(out.motion.frames), obs,
                                fps, config);
  } catch (const InvalidInput& e) {
    throw ComputationError("refine: diverged at iteration " +
                           std::to_string(config.iterations) + ": " + e.what());
  }
  if (!std::isfinite(last.total)) {
    throw ComputationError("refine: loss is not finite at iteration " +
                           std::to_string(config.iterations));
  }
  report.loss.push_back(last);

  const DynamicsResult noisy_dyn = dynamics_from_poses<double>(
      skel, segs, observed.frames, fps, config.mode);
  const DynamicsResult refined_dyn = dynamics_from_poses<double>(
      skel, segs, out.motion.frames, fps, config.mode);
  report.hip_noisy = joint_torque_norms(noisy_dyn, kLeftHip);
  report.hip_refined = joint_torque_norms(refined_dyn, kLeftHip);
  if (clean) {
    const DynamicsResult clean_dyn = dynamics_from_poses<double>(
        skel, segs, clean->frames, fps, config.mode);
    report.has_reference = true;
    report.hip_clean = joint_torque_norms(clean_dyn, kLeftHip);
    report.initial_torque_error = torque_error(noisy_dyn, clean_dyn);
    report.final_torque_error = torque_error(refined_dyn, clean_dyn);
    report.initial_pose_error = pose_error(observed, *clean);
    report.final_pose_error = pose_error(out.motion, *clean);
  }
  out.report = std::move(report);
  return out;
}

std::string report_to_json(const RefinementReport& r) {
  nlohmann::json j;
  const RefinementConfig& c = r.config;
  j["config"] = {{"lambda_smooth", c.lambda_smooth},
                 {"lambda_magnitude", c.lambda_magnitude},
                 {"lambda_reg", c.lambda_reg},
                 {"tau_max", c.tau_max},
                 {"iterations", c.iterations},
                 {"step_size", c.step_size},
                 {"beta1", c.beta1},
                 {"beta2", c.beta2},
                 {"epsilon", c.epsilon},
                 {"freeze_translation", c.freeze_translation},
                 {"filter_cutoff_hz", c.filter_cutoff_hz},
                 {"mode", c.mode == DynamicsMode::kPaperFaithful
                              ? "paper-faithful"
                              : "com-corrected"}};
  j["frames"] = r.frames;
  j["fps"] = r.fps;
  nlohmann::json loss = nlohmann::json::array();
  for (const LossTerms& t : r.loss) {
    loss.push_back({{"total", t.total},
                    {"smooth", t.smooth},
                    {"magnitude", t.magnitude},
                    {"reg", t.reg}});
  }
  j["loss"] = loss;
  if (r.has_reference) {
    j["torque_error_nm"] = {{"initial", r.initial_torque_error},
                            {"final", r.final_torque_error},
                            {"reduction", r.torque_reduction()}};
    j["pose_error_rad"] = {{"initial", r.initial_pose_error},
                           {"final", r.final_pose_error},
                           {"relative_change", r.pose_error_change()}};
  }
  j["left_hip_torque_nm"] = {{"first_frame", kBoundaryFrames},
                             {"clean", r.hip_clean},
                             {"noisy", r.hip_noisy},
                             {"refined", r.hip_refined}};
  return j.dump(2);
}

std::string hip_torque_csv(const RefinementReport& r) {
  std::string s = "frame,clean_nm,noisy_nm,refined_nm\n";
  char line[128];
  for (std::size_t i = 0; i < r.hip_refined.size(); ++i) {
    const double clean = i < r.hip_clean.size() ? r.hip_clean[i] : NAN;
    std::snprintf(line, sizeof(line), "%d,%.9g,%.9g,%.9g\n",
                  static_cast<int>(i) + kBoundaryFrames, clean, r.hip_noisy[i],
                  r.hip_refined[i]);
    s += line;
  }
  return s;
}

}  // namespace idyn
