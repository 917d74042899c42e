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

// Body segment parameters: mass, centre of mass and inertia per SMPL joint,
// derived from anthropometric fractions of total body mass.

#ifndef IDYN_SEGMENT_PARAMS_HPP_
#define IDYN_SEGMENT_PARAMS_HPP_

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "idyn/skeleton.hpp"

namespace idyn {

// One anthropometric table row. Fractions of segment length are measured
// from the proximal (cranial, for head and trunk) endpoint.
struct BspRow {
  double mass_fraction = 0.0;
  double com_fraction = 0.0;
  double r_gyr_sagittal = 0.0;
  double r_gyr_transverse = 0.0;
  double r_gyr_longitudinal = 0.0;
};

// Rows keyed by segment name: head, upper_trunk, middle_trunk, lower_trunk,
// upper_arm, forearm, hand, thigh, shank, foot. Limb rows are per side.
using BspTable = std::map<std::string, BspRow, std::less<>>;

// de Leva (1996) adjusted Zatsiorsky-Seluyanov parameters, male column.
BspTable de_leva_male();

BspTable load_bsp_table(const std::filesystem::path& path);
BspTable bsp_table_from_json(std::string_view text);
std::string bsp_table_to_json(const BspTable& table);

// Sum of mass fractions over the whole body (limb rows counted twice).
double body_mass_fraction_sum(const BspTable& table);

struct SegmentParams {
  double mass = 0.0;  // kg
  // Centre of mass in the joint's local frame, m.
  Vec3 com_offset{};
  // Principal moments about the centre of mass in the local frame, kg m^2.
  Vec3 inertia_diag{};

  Mat3 inertia_local() const {
    return Mat3::diagonal(inertia_diag.x, inertia_diag.y, inertia_diag.z);
  }
};

struct BodySegments {
  std::array<SegmentParams, kNumJoints> segment{};
  // Mass fraction sum of the table before renormalisation.
  double raw_fraction_sum = 1.0;

  double total_mass() const;
};

// Tolerance on the raw fraction sum before a table is rejected.
inline constexpr double kFractionSumTolerance = 1e-3;
// Share of the upper trunk assigned to each collar (shoulder girdle).
inline constexpr double kCollarShareOfUpperTrunk = 0.10;

// Maps table segments onto the 24 joints. Each joint carries the segment
// spanning from it to its child; spine1..3 split the middle and upper trunk
// in proportion to their lengths; leaf joints (head, feet, hands) carry no
// mass. Throws ConfigError if the fractions do not sum to 1 within 1e-3.
BodySegments build_segment_params(const Skeleton& skel,
                                  const BspTable& table = de_leva_male());

// R * I_local * R^T.
Mat3 world_inertia(const SegmentParams& params, const Mat3& r);

}  // namespace idyn

#endif  // IDYN_SEGMENT_PARAMS_HPP_
