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

#include "idyn/rnea.hpp"

#include <cstdio>
#include <fstream>

namespace idyn {
namespace {

void check_pair(const DynamicsResult& a, const DynamicsResult& b,
                int exclude) {
  if (a.frames != b.frames || a.torque.size() != b.torque.size()) {
    throw InvalidInput("torque_error: dimension mismatch (" +
                       std::to_string(a.frames) + " vs " +
                       std::to_string(b.frames) + " frames)");
  }
  if (exclude < 0 || a.frames - 2 * exclude < 1) {
    throw SequenceTooShort("torque_error: no frames left after excluding " +
                           std::to_string(exclude) + " at each end");
  }
}

}  // namespace

double torque_error(const DynamicsResult& result,
                    const DynamicsResult& reference, int exclude_boundary) {
  check_pair(result, reference, exclude_boundary);
  const std::size_t first = result.at(exclude_boundary, 0);
  const std::size_t count =
      static_cast<std::size_t>(result.frames - 2 * exclude_boundary) *
      kNumJoints;
  const double sum = simd::kernels().sum_norm3_diff(
      reinterpret_cast<const double*>(result.torque.data() + first),
      reinterpret_cast<const double*>(reference.torque.data() + first), count);
  return sum / static_cast<double>(count);
}

std::vector<double> per_joint_torque_error(const DynamicsResult& result,
                                           const DynamicsResult& reference,
                                           int exclude_boundary) {
  check_pair(result, reference, exclude_boundary);
  std::vector<double> out(kNumJoints, 0.0);
  const int frames = result.frames - 2 * exclude_boundary;
  for (int t = exclude_boundary; t < result.frames - exclude_boundary; ++t) {
    for (int j = 0; j < kNumJoints; ++j) {
      out[j] += norm(result.torque[result.at(t, j)] -
                     reference.torque[reference.at(t, j)]);
    }
  }
  for (double& v : out) v /= frames;
  return out;
}

std::string dynamics_to_csv(const DynamicsResult& result,
                            int exclude_boundary) {
  std::string out = "frame,joint_name,fx,fy,fz,tx,ty,tz\n";
  char line[256];
  for (int t = exclude_boundary; t < result.frames - exclude_boundary; ++t) {
    for (int j = 0; j < kNumJoints; ++j) {
      const Vec3& f = result.force[result.at(t, j)];
      const Vec3& tau = result.torque[result.at(t, j)];
      std::snprintf(line, sizeof(line),
                    "%d,%s,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", t,
                    std::string(kJointNames[j]).c_str(), f.x, f.y, f.z, tau.x,
                    tau.y, tau.z);
      out += line;
    }
  }
  return out;
}

void save_dynamics_csv(const DynamicsResult& result,
                       const std::filesystem::path& path,
                       int exclude_boundary) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << dynamics_to_csv(result, exclude_boundary);
}

}  // namespace idyn
