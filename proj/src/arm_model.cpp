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

#include "teleop/arm_model.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "teleop/config_text.hpp"

namespace teleop {

namespace {

constexpr double kUnitTol = 1e-9;

bool quat_bits_equal(const Quat& a, const Quat& b) { return a.coeffs() == b.coeffs(); }

}  // namespace

bool operator==(const JointSpec& a, const JointSpec& b) {
  return a.name == b.name && a.axis == b.axis && a.origin_translation == b.origin_translation &&
         quat_bits_equal(a.origin_rotation, b.origin_rotation) && a.limits == b.limits &&
         a.max_velocity == b.max_velocity && a.max_torque == b.max_torque && a.mass == b.mass && a.com == b.com &&
         a.viscous_friction == b.viscous_friction && a.coulomb_friction == b.coulomb_friction;
}

bool operator==(const KinematicChain& a, const KinematicChain& b) {
  return a.name == b.name && a.joints == b.joints && a.ee_offset == b.ee_offset && a.gravity == b.gravity;
}

VecX KinematicChain::lower_limits() const {
  VecX v(dof());
  for (std::size_t i = 0; i < dof(); ++i) v[static_cast<Eigen::Index>(i)] = joints[i].limits.min;
  return v;
}

VecX KinematicChain::upper_limits() const {
  VecX v(dof());
  for (std::size_t i = 0; i < dof(); ++i) v[static_cast<Eigen::Index>(i)] = joints[i].limits.max;
  return v;
}

VecX KinematicChain::clamp_to_limits(const VecX& q) const {
  VecX out = q;
  for (std::size_t i = 0; i < dof(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out[k] = joints[i].limits.clamp(q[k]);
  }
  return out;
}

bool KinematicChain::within_limits(const VecX& q) const {
  if (static_cast<std::size_t>(q.size()) != dof()) return false;
  for (std::size_t i = 0; i < dof(); ++i) {
    if (!joints[i].limits.contains(q[static_cast<Eigen::Index>(i)])) return false;
  }
  return true;
}

std::vector<std::string> validate_chain(const KinematicChain& chain) {
  std::vector<std::string> issues;
  if (chain.joints.empty()) issues.push_back("chain '" + chain.name + "' has no joints");
  std::set<std::string> names;
  for (std::size_t i = 0; i < chain.joints.size(); ++i) {
    const auto& j = chain.joints[i];
    const std::string tag = "joint " + std::to_string(i + 1) + " ('" + j.name + "')";
    if (j.name.empty()) issues.push_back(tag + ": empty name");
    if (!names.insert(j.name).second) issues.push_back(tag + ": duplicate joint name");
    if (!j.axis.allFinite() || std::abs(j.axis.norm() - 1.0) > kUnitTol) {
      issues.push_back(tag + ": non-unit axis (norm " + format_double(j.axis.norm()) + ")");
    }
    if (!j.origin_rotation.coeffs().allFinite() || std::abs(j.origin_rotation.norm() - 1.0) > kUnitTol) {
      issues.push_back(tag + ": non-unit origin_rotation quaternion");
    }
    if (!(j.limits.min < j.limits.max)) issues.push_back(tag + ": inverted limits (min must be < max)");
    if (!(j.mass >= 0.0)) issues.push_back(tag + ": negative mass");
    if (!(j.viscous_friction >= 0.0)) issues.push_back(tag + ": negative viscous_friction");
    if (!(j.coulomb_friction >= 0.0)) issues.push_back(tag + ": negative coulomb_friction");
    if (!(j.max_velocity > 0.0)) issues.push_back(tag + ": max_velocity must be > 0");
    if (!(j.max_torque > 0.0)) issues.push_back(tag + ": max_torque must be > 0");
    if (!j.origin_translation.allFinite() || !j.com.allFinite()) issues.push_back(tag + ": non-finite vector");
  }
  if (!chain.ee_offset.allFinite()) issues.push_back("ee_offset is not finite");
  if (!chain.gravity.allFinite()) issues.push_back("gravity is not finite");
  return issues;
}

KinematicChain parse_chain(std::string_view config_text) {
  const ConfigDocument doc = parse_config_text(config_text);
  std::vector<std::string> issues;
  KinematicChain chain;
  bool saw_chain = false;

  for (const auto& section : doc.sections) {
    SectionReader r(section, issues);
    if (section.name == "chain") {
      if (saw_chain) issues.push_back("line " + std::to_string(section.line) + ": duplicate [chain] section");
      saw_chain = true;
      chain.name = r.require_string("name");
      chain.ee_offset = r.get_vec3("ee_offset", Vec3::Zero());
      chain.gravity = r.get_vec3("gravity", Vec3(0.0, 0.0, -9.81));
    } else if (section.name == "joint") {
      JointSpec j;
      j.name = r.require_string("name");
      j.axis = r.require_vec3("axis");
      j.origin_translation = r.get_vec3("origin_translation", Vec3::Zero());
      j.origin_rotation = r.get_quat("origin_rotation", Quat::Identity());
      const auto lim = r.require_numbers("limits", 2);
      j.limits = {lim[0], lim[1]};
      j.max_velocity = r.get_double("max_velocity", j.max_velocity);
      j.max_torque = r.get_double("max_torque", j.max_torque);
      j.mass = r.get_double("mass", 0.0);
      j.com = r.get_vec3("com", Vec3::Zero());
      j.viscous_friction = r.get_double("viscous_friction", 0.0);
      j.coulomb_friction = r.get_double("coulomb_friction", 0.0);
      chain.joints.push_back(std::move(j));
    } else {
      issues.push_back("line " + std::to_string(section.line) + ": unknown section [" + section.name + "]");
      continue;
    }
    r.finish();
  }
  if (!saw_chain) issues.push_back("missing [chain] section");

  auto semantic = validate_chain(chain);
  issues.insert(issues.end(), semantic.begin(), semantic.end());
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return chain;
}

KinematicChain load_chain(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open chain file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_chain(ss.str());
}

std::string serialize_chain(const KinematicChain& chain) {
  std::ostringstream out;
  out << "[chain]\n";
  out << "name = " << chain.name << "\n";
  out << "ee_offset = " << format_vec3(chain.ee_offset) << "\n";
  out << "gravity = " << format_vec3(chain.gravity) << "\n";
  for (const auto& j : chain.joints) {
    out << "\n[joint]\n";
    out << "name = " << j.name << "\n";
    out << "axis = " << format_vec3(j.axis) << "\n";
    out << "origin_translation = " << format_vec3(j.origin_translation) << "\n";
    out << "origin_rotation = " << format_quat(j.origin_rotation) << "\n";
    out << "limits = " << format_double(j.limits.min) << " " << format_double(j.limits.max) << "\n";
    out << "max_velocity = " << format_double(j.max_velocity) << "\n";
    out << "max_torque = " << format_double(j.max_torque) << "\n";
    out << "mass = " << format_double(j.mass) << "\n";
    out << "com = " << format_vec3(j.com) << "\n";
    out << "viscous_friction = " << format_double(j.viscous_friction) << "\n";
    out << "coulomb_friction = " << format_double(j.coulomb_friction) << "\n";
  }
  return out.str();
}

double workspace_radius(const KinematicChain& chain) {
  double r = chain.ee_offset.norm();
  for (const auto& j : chain.joints) r += j.origin_translation.norm();
  return r;
}

}  // namespace teleop
