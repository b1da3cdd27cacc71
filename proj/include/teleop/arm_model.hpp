// Copyright 2026 The Virtual Force Teleop Authors
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

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "teleop/types.hpp"

namespace teleop {

struct JointLimits {
  double min = 0.0;
  double max = 0.0;

  bool contains(double q) const { return q >= min && q <= max; }
  double clamp(double q) const { return q < min ? min : (q > max ? max : q); }
  bool operator==(const JointLimits&) const = default;
};

/// One revolute joint plus the link it carries.
///
/// The joint frame sits at `origin_translation` / `origin_rotation` relative
/// to the previous link frame; the joint rotates about `axis` (expressed in
/// that joint frame). `com` and `mass` describe the carried link as a point
/// mass in the frame after the joint rotation.
struct JointSpec {
  std::string name;
  Vec3 axis = Vec3::UnitZ();
  Vec3 origin_translation = Vec3::Zero();
  Quat origin_rotation = Quat::Identity();
  JointLimits limits{-3.14159, 3.14159};
  double max_velocity = 2.0;   // rad/s
  double max_torque = 10.0;    // N*m
  double mass = 0.0;           // kg
  Vec3 com = Vec3::Zero();     // m, link frame
  double viscous_friction = 0.0;   // N*m*s/rad
  double coulomb_friction = 0.0;   // N*m
};

bool operator==(const JointSpec& a, const JointSpec& b);

/// Serial chain of revolute joints, base to tip. Immutable once parsed.
struct KinematicChain {
  std::string name;
  std::vector<JointSpec> joints;
  Vec3 ee_offset = Vec3::Zero();
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);

  std::size_t dof() const { return joints.size(); }
  VecX lower_limits() const;
  VecX upper_limits() const;
  VecX clamp_to_limits(const VecX& q) const;
  bool within_limits(const VecX& q) const;
};

bool operator==(const KinematicChain& a, const KinematicChain& b);

/// Returns every invariant violation (empty when valid).
std::vector<std::string> validate_chain(const KinematicChain& chain);

/// Parses the chain text format. Throws ConfigSyntaxError for malformed text
/// and ConfigError (listing all violations) for invalid models.
KinematicChain parse_chain(std::string_view config_text);
KinematicChain load_chain(const std::filesystem::path& path);

/// Inverse of parse_chain; doubles are written round-trip exact.
std::string serialize_chain(const KinematicChain& chain);

/// Sum of link translation norms plus the end-effector offset norm. Upper
/// bound on the distance of the end-effector from the base origin.
double workspace_radius(const KinematicChain& chain);

}  // namespace teleop
