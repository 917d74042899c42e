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

#include "idyn/segment_params.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace idyn {
namespace {

constexpr std::array<std::string_view, 10> kRowNames = {
    "head",      "upper_trunk", "middle_trunk", "lower_trunk", "upper_arm",
    "forearm",   "hand",        "thigh",        "shank",       "foot"};

bool is_limb(std::string_view name) {
  return name == "upper_arm" || name == "forearm" || name == "hand" ||
         name == "thigh" || name == "shank" || name == "foot";
}

const BspRow& row(const BspTable& table, std::string_view name) {
  auto it = table.find(name);
  if (it == table.end()) {
    throw ConfigError("BSP table is missing segment '" + std::string(name) +
                      "'");
  }
  return it->second;
}

// Segment i spans from joint i to joint kSegmentEnd[i]; -1 for leaves.
constexpr std::array<int, kNumJoints> kSegmentEnd = {
    kSpine1,   kLeftKnee,     kRightKnee,     kSpine2,    kLeftAnkle,
    kRightAnkle, kSpine3,     kLeftFoot,      kRightFoot, kNeck,
    -1,        -1,            kHead,          kLeftShoulder, kRightShoulder,
    -1,        kLeftElbow,    kRightElbow,    kLeftWrist, kRightWrist,
    kLeftHand, kRightHand,    -1,             -1};

// Principal moments from radii of gyration. The longitudinal axis is the
// dominant direction of the rest-pose bone; the sagittal-plane radius goes to
// z (anterior-posterior) when z is free, otherwise to y.
Vec3 principal_moments(double mass, double length, const Vec3& bone,
                       const BspRow& r) {
  const double ax = std::abs(bone.x), ay = std::abs(bone.y),
               az = std::abs(bone.z);
  int lon = 1;
  if (ax >= ay && ax >= az) lon = 0;
  if (az > ax && az > ay) lon = 2;
  const int sag = lon == 2 ? 1 : 2;
  const int trn = 3 - lon - sag;
  Vec3 d;
  d[lon] = mass * std::pow(r.r_gyr_longitudinal * length, 2);
  d[sag] = mass * std::pow(r.r_gyr_sagittal * length, 2);
  d[trn] = mass * std::pow(r.r_gyr_transverse * length, 2);
  return d;
}

}  // namespace

BspTable de_leva_male() {
  // mass fraction, CoM fraction, radii of gyration (sagittal, transverse,
  // longitudinal) as fractions of segment length.
  return {
      {"head", {0.0694, 0.5976, 0.362, 0.376, 0.312}},
      {"upper_trunk", {0.1596, 0.2999, 0.716, 0.454, 0.659}},
      {"middle_trunk", {0.1633, 0.4502, 0.482, 0.383, 0.468}},
      {"lower_trunk", {0.1117, 0.6115, 0.615, 0.551, 0.587}},
      {"upper_arm", {0.0271, 0.5772, 0.285, 0.269, 0.158}},
      {"forearm", {0.0162, 0.4574, 0.276, 0.265, 0.121}},
      {"hand", {0.0061, 0.7900, 0.628, 0.513, 0.401}},
      {"thigh", {0.1416, 0.4095, 0.329, 0.329, 0.149}},
      {"shank", {0.0433, 0.4459, 0.255, 0.249, 0.103}},
      {"foot", {0.0137, 0.4415, 0.257, 0.245, 0.124}},
  };
}

double body_mass_fraction_sum(const BspTable& table) {
  double sum = 0.0;
  for (const auto& [name, r] : table) {
    sum += (is_limb(name) ? 2.0 : 1.0) * r.mass_fraction;
  }
  return sum;
}

double BodySegments::total_mass() const {
  double m = 0.0;
  for (const auto& s : segment) m += s.mass;
  return m;
}

BodySegments build_segment_params(const Skeleton& skel,
                                  const BspTable& table) {
  skel.validate();
  for (std::string_view name : kRowNames) {
    const BspRow& r = row(table, name);
    if (r.mass_fraction < 0.0 || r.com_fraction < 0.0 ||
        r.com_fraction > 1.0 || r.r_gyr_sagittal < 0.0 ||
        r.r_gyr_transverse < 0.0 || r.r_gyr_longitudinal < 0.0) {
      throw ConfigError("BSP table row '" + std::string(name) +
                        "' has out-of-range values");
    }
  }
  const double sum = body_mass_fraction_sum(table);
  if (std::abs(sum - 1.0) > kFractionSumTolerance) {
    throw ConfigError("BSP mass fractions sum to " + std::to_string(sum) +
                      ", expected 1 within 1e-3");
  }

  // Fraction of body mass, row used for geometry, and whether the joint sits
  // at the distal (caudal) end of the table segment.
  struct Assignment {
    double fraction = 0.0;
    std::string_view row;
    bool joint_at_distal_end = false;
  };
  std::array<Assignment, kNumJoints> assign{};

  auto seg_length = [&](int j) {
    return kSegmentEnd[j] < 0 ? 0.0 : norm(skel.offset[kSegmentEnd[j]]);
  };

  const double upper = row(table, "upper_trunk").mass_fraction;
  const double middle = row(table, "middle_trunk").mass_fraction;
  const double collar = kCollarShareOfUpperTrunk * upper;
  const double spine_pool = middle + upper - 2.0 * collar;
  const double spine_len =
      seg_length(kSpine1) + seg_length(kSpine2) + seg_length(kSpine3);

  assign[kPelvis] = {row(table, "lower_trunk").mass_fraction, "lower_trunk",
                     true};
  assign[kSpine1] = {spine_pool * seg_length(kSpine1) / spine_len,
                     "middle_trunk", true};
  assign[kSpine2] = {spine_pool * seg_length(kSpine2) / spine_len,
                     "middle_trunk", true};
  assign[kSpine3] = {spine_pool * seg_length(kSpine3) / spine_len,
                     "upper_trunk", true};
  assign[kNeck] = {row(table, "head").mass_fraction, "head", true};
  assign[kLeftCollar] = {collar, "upper_trunk", false};
  assign[kRightCollar] = {collar, "upper_trunk", false};
  for (int side = 0; side < 2; ++side) {
    assign[kLeftHip + side] = {row(table, "thigh").mass_fraction, "thigh"};
    assign[kLeftKnee + side] = {row(table, "shank").mass_fraction, "shank"};
    assign[kLeftAnkle + side] = {row(table, "foot").mass_fraction, "foot"};
    assign[kLeftShoulder + side] = {row(table, "upper_arm").mass_fraction,
                                    "upper_arm"};
    assign[kLeftElbow + side] = {row(table, "forearm").mass_fraction,
                                 "forearm"};
    assign[kLeftWrist + side] = {row(table, "hand").mass_fraction, "hand"};
  }

  double assigned = 0.0;
  for (const auto& a : assign) assigned += a.fraction;
  // Residual after the mapping goes to the pelvis.
  assign[kPelvis].fraction += sum - assigned;

  BodySegments out;
  out.raw_fraction_sum = sum;
  for (int j = 0; j < kNumJoints; ++j) {
    const Assignment& a = assign[j];
    SegmentParams& p = out.segment[j];
    p.mass = skel.total_mass * a.fraction / sum;
    if (kSegmentEnd[j] < 0 || p.mass == 0.0) continue;
    const BspRow& r = row(table, a.row);
    const Vec3 bone = skel.offset[kSegmentEnd[j]];
    const double along =
        a.joint_at_distal_end ? 1.0 - r.com_fraction : r.com_fraction;
    p.com_offset = along * bone;
    p.inertia_diag = principal_moments(p.mass, norm(bone), bone, r);
  }
  return out;
}

Mat3 world_inertia(const SegmentParams& params, const Mat3& r) {
  Mat3 out = r * params.inertia_local() * r.transpose();
  // Symmetrise away rounding.
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const double s = 0.5 * (out(i, j) + out(j, i));
      out(i, j) = s;
      out(j, i) = s;
    }
  }
  return out;
}

BspTable bsp_table_from_json(std::string_view text) {
  BspTable table;
  try {
    const auto j = nlohmann::json::parse(text);
    for (const auto& [name, v] : j.items()) {
      BspRow r;
      r.mass_fraction = v.at("mass_fraction").get<double>();
      r.com_fraction = v.at("com_fraction").get<double>();
      r.r_gyr_sagittal = v.at("r_gyr_sagittal").get<double>();
      r.r_gyr_transverse = v.at("r_gyr_transverse").get<double>();
      r.r_gyr_longitudinal = v.at("r_gyr_longitudinal").get<double>();
      table[name] = r;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("BSP table: ") + e.what());
  }
  return table;
}

std::string bsp_table_to_json(const BspTable& table) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, r] : table) {
    j[name] = {{"mass_fraction", r.mass_fraction},
               {"com_fraction", r.com_fraction},
               {"r_gyr_sagittal", r.r_gyr_sagittal},
               {"r_gyr_transverse", r.r_gyr_transverse},
               {"r_gyr_longitudinal", r.r_gyr_longitudinal}};
  }
  return j.dump(2);
}

BspTable load_bsp_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open BSP table " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return bsp_table_from_json(buf.str());
}

}  // namespace idyn
