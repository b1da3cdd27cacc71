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

#include "teleop/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "teleop/config_text.hpp"

namespace teleop {

namespace {

// Leader impedance defaults, N*m/rad and N*m*s/rad.
constexpr double kLeaderKp = 2.0;
constexpr double kLeaderKd = 0.05;
constexpr double kLeaderGainHeadroom = 2.5;

double min_jerk(double tau) { return tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau)); }
double min_jerk_rate(double tau) { return 30.0 * tau * tau * (1.0 - tau) * (1.0 - tau); }

std::string line_tag(const ConfigSection& s) { return "line " + std::to_string(s.line); }

}  // namespace

OperatorPath::OperatorPath(std::vector<Waypoint> waypoints) : waypoints_(std::move(waypoints)) {
  if (waypoints_.empty()) throw std::invalid_argument("operator path needs at least one waypoint");
  for (std::size_t i = 1; i < waypoints_.size(); ++i) {
    if (!(waypoints_[i].time > waypoints_[i - 1].time)) {
      throw std::invalid_argument("operator path waypoint times must increase strictly");
    }
  }
}

Vec3 OperatorPath::position(double t) const {
  if (waypoints_.empty()) return Vec3::Zero();
  if (t <= waypoints_.front().time) return waypoints_.front().position;
  for (std::size_t i = 1; i < waypoints_.size(); ++i) {
    const auto& a = waypoints_[i - 1];
    const auto& b = waypoints_[i];
    if (t < b.time) return a.position + min_jerk((t - a.time) / (b.time - a.time)) * (b.position - a.position);
  }
  return waypoints_.back().position;
}

Vec3 OperatorPath::velocity(double t) const {
  if (waypoints_.empty() || t <= waypoints_.front().time) return Vec3::Zero();
  for (std::size_t i = 1; i < waypoints_.size(); ++i) {
    const auto& a = waypoints_[i - 1];
    const auto& b = waypoints_[i];
    const double span = b.time - a.time;
    if (t < b.time) return min_jerk_rate((t - a.time) / span) / span * (b.position - a.position);
  }
  return Vec3::Zero();
}

std::int64_t Scenario::ticks() const { return static_cast<std::int64_t>(std::llround(duration * tick_rate)); }

std::vector<std::string> validate_scenario(const Scenario& s) {
  std::vector<std::string> issues;
  auto check = [&](bool ok, const std::string& msg) {
    if (!ok) issues.push_back(msg);
  };
  auto check_thrown = [&](auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      issues.emplace_back(e.what());
    }
  };

  check(!s.name.empty(), "scenario: name must not be empty");
  check(s.duration > 0.0 && std::isfinite(s.duration), "scenario: duration must be > 0");
  check(s.tick_rate >= 50 && s.tick_rate <= 1000, "scenario: tick_rate must be in [50, 1000] Hz");
  check(s.stale_timeout_ticks >= 0, "scenario: stale_timeout_ticks must be >= 0");

  const auto ln = static_cast<Eigen::Index>(s.leader.dof());
  const auto fn = static_cast<Eigen::Index>(s.follower.dof());
  check_thrown([&] { validate_retarget(s.retarget); });
  check_thrown([&] { validate_feedback_params(s.feedback); });
  check_thrown([&] { validate_ik_settings(s.follower_weights, s.follower_ik); });
  check(s.follower_weights.w_elbow == 0.0 || s.follower_ik.elbow_joint_index < s.follower.dof(),
        "ik: elbow_joint_index out of range for follower chain");
  check_thrown([&] { validate_gains(s.leader_gains); });
  check(s.leader_gains.kp.size() == ln && s.leader_gains.kd.size() == ln,
        "leader_control: kp/kd need one entry per leader joint");
  check(s.feedback.kp_max.size() == ln && s.feedback.kd_max.size() == ln,
        "leader_control: kp_max/kd_max need one entry per leader joint");
  if (s.leader_gains.kp.size() == s.feedback.kp_max.size() && s.leader_gains.kd.size() == s.feedback.kd_max.size()) {
    check((s.feedback.kp_max.array() >= s.leader_gains.kp.array()).all() &&
              (s.feedback.kd_max.array() >= s.leader_gains.kd.array()).all(),
          "leader_control: gain clamps must not be below the base gains");
  }
  check(s.leader_home.size() == ln && s.leader.within_limits(s.leader_home),
        "leader_control: home must have one entry per joint and lie within limits");
  check(s.follower_home.size() == fn && s.follower.within_limits(s.follower_home),
        "follower_control: home must have one entry per joint and lie within limits");
  check(s.leader_model.armature >= 0.0 && s.follower_control.armature > 0.0,
        "armature must be >= 0 (leader) and > 0 (follower)");
  check(s.follower_control.bandwidth > 0.0, "follower_control: bandwidth must be > 0");
  check(s.follower_control.feedforward_gain >= 0.0 && s.follower_control.feedforward_gain <= 1.0,
        "follower_control: feedforward_gain must be in [0, 1]");
  check(s.operator_model.hand_stiffness > 0.0, "operator: hand_stiffness must be > 0");
  check(s.operator_model.hand_damping >= 0.0, "operator: hand_damping must be >= 0");
  check(std::abs(s.orientation_source.norm() - 1.0) <= 1e-9, "operator: orientation must be a unit quaternion");
  check(s.gripper >= 0.0 && s.gripper <= 1.0, "operator: gripper must be in [0, 1]");
  check(!s.path.waypoints().empty(), "scenario: at least one [waypoint] is required");
  auto world_issues = validate_world(s.world);
  issues.insert(issues.end(), world_issues.begin(), world_issues.end());
  check_thrown([&] { validate_channel_model(s.channel); });
  return issues;
}

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
  const ConfigDocument doc = parse_config_text(text);
  std::vector<std::string> issues;
  Scenario s;
  std::set<std::string> seen;
  std::vector<Waypoint> waypoints;
  bool spring_scale_set = false;
  VecX kp, kd, kp_max, kd_max, leader_home, follower_home;
  std::string transform_name = "squared";

  // Chains are loaded first so vector defaults can be sized.
  for (const auto& section : doc.sections) {
    if (section.name != "scenario") continue;
    for (const auto& e : section.entries) {
      if (e.key == "leader_chain") s.leader_chain_path = base_dir / e.value;
      if (e.key == "follower_chain") s.follower_chain_path = base_dir / e.value;
    }
  }
  if (s.leader_chain_path.empty()) issues.push_back("[scenario]: missing key 'leader_chain'");
  if (s.follower_chain_path.empty()) issues.push_back("[scenario]: missing key 'follower_chain'");
  if (!issues.empty()) throw ConfigError(std::move(issues));
  s.leader = load_chain(s.leader_chain_path);
  s.follower = load_chain(s.follower_chain_path);

  for (const auto& section : doc.sections) {
    SectionReader r(section, issues);
    const bool repeatable = section.name == "waypoint" || section.name == "obstacle";
    if (!repeatable && !seen.insert(section.name).second) {
      issues.push_back(line_tag(section) + ": duplicate [" + section.name + "] section");
    }
    if (section.name == "scenario") {
      s.name = r.require_string("name");
      r.require_string("leader_chain");
      r.require_string("follower_chain");
      s.duration = r.require_double("duration");
      s.tick_rate = static_cast<int>(r.get_int("tick_rate", s.tick_rate));
      s.seed = static_cast<std::uint64_t>(r.get_int("seed", 0));
      s.stale_timeout_ticks = static_cast<int>(r.get_int("stale_timeout_ticks", s.stale_timeout_ticks));
    } else if (section.name == "retarget") {
      s.retarget.scale = r.get_double("scale", 1.0);
      s.retarget.leader_origin = r.get_vec3("leader_origin", Vec3::Zero());
      s.retarget.follower_origin = r.get_vec3("follower_origin", Vec3::Zero());
      s.retarget.rotation = r.get_quat("rotation", Quat::Identity());
    } else if (section.name == "feedback") {
      s.feedback.alpha = r.get_double("alpha", s.feedback.alpha);
      transform_name = r.get_string("transform", transform_name);
      s.feedback.deviation_clamp = r.get_double("deviation_clamp", s.feedback.deviation_clamp);
      s.feedback.factor_clamp = r.get_double("factor_clamp", s.feedback.factor_clamp);
      spring_scale_set = r.has("spring_scale");
      s.feedback.spring_scale = r.get_double("spring_scale", 1.0);
      s.feedback.gain_gamma = r.get_double("gain_gamma", s.feedback.gain_gamma);
    } else if (section.name == "ik") {
      auto& p = s.follower_ik;
      auto& w = s.follower_weights;
      p.damping = r.get_double("damping", p.damping);
      p.max_iterations = static_cast<int>(r.get_int("max_iterations", p.max_iterations));
      p.position_tol = r.get_double("position_tol", p.position_tol);
      p.orientation_tol = r.get_double("orientation_tol", p.orientation_tol);
      p.step_clamp = r.get_double("step_clamp", p.step_clamp);
      p.elbow_z_ref = r.get_double("elbow_z_ref", p.elbow_z_ref);
      p.elbow_joint_index = static_cast<std::size_t>(r.get_int("elbow_joint_index", 3));
      w.w_position = r.get_double("w_position", w.w_position);
      w.w_orientation = r.get_double("w_orientation", w.w_orientation);
      w.w_base_yaw = r.get_double("w_base_yaw", w.w_base_yaw);
      w.w_elbow = r.get_double("w_elbow", w.w_elbow);
    } else if (section.name == "leader_control") {
      const auto n = static_cast<Eigen::Index>(s.leader.dof());
      kp = r.get_vector("kp", VecX::Constant(n, kLeaderKp));
      kd = r.get_vector("kd", VecX::Constant(n, kLeaderKd));
      kp_max = r.get_vector("kp_max", kp * kLeaderGainHeadroom);
      kd_max = r.get_vector("kd_max", kd * kLeaderGainHeadroom);
      s.leader_model.armature = r.get_double("armature", s.leader_model.armature);
      leader_home = r.get_vector("home", VecX());
    } else if (section.name == "follower_control") {
      s.follower_control.bandwidth = r.get_double("bandwidth", s.follower_control.bandwidth);
      s.follower_control.armature = r.get_double("armature", s.follower_control.armature);
      s.follower_control.feedforward_gain =
          r.get_double("feedforward_gain", s.follower_control.feedforward_gain);
      follower_home = r.get_vector("home", VecX());
    } else if (section.name == "operator") {
      s.operator_model.hand_stiffness = r.get_double("hand_stiffness", s.operator_model.hand_stiffness);
      s.operator_model.hand_damping = r.get_double("hand_damping", s.operator_model.hand_damping);
      s.orientation_source = r.get_quat("orientation", Quat::Identity());
      s.gripper = r.get_double("gripper", 0.0);
    } else if (section.name == "waypoint") {
      waypoints.push_back(Waypoint{r.require_double("time"), r.require_vec3("position")});
    } else if (section.name == "obstacle") {
      HalfSpace h;
      h.name = r.get_string("name", "");
      h.normal = r.require_vec3("normal");
      h.offset = r.require_double("offset");
      h.stiffness = r.get_double("stiffness", h.stiffness);
      h.damping = r.get_double("damping", h.damping);
      h.visible = r.get_bool("visible", true);
      s.world.half_spaces.push_back(std::move(h));
    } else if (section.name == "channel") {
      s.channel.drop_probability = r.get_double("drop_probability", 0.0);
      s.channel.latency_ticks = static_cast<int>(r.get_int("latency_ticks", 0));
      s.channel.jitter_ticks = static_cast<int>(r.get_int("jitter_ticks", 0));
    } else {
      issues.push_back(line_tag(section) + ": unknown section [" + section.name + "]");
      continue;
    }
    r.finish();
  }
  if (!seen.contains("scenario")) issues.push_back("missing [scenario] section");

  if (auto t = parse_transform(transform_name)) {
    s.feedback.transform = *t;
  } else {
    issues.push_back("[feedback]: unknown transform '" + transform_name + "' (expected abs, squared, exp or tanh)");
  }
  if (!spring_scale_set && s.retarget.scale > 0.0) s.feedback.spring_scale = 1.0 / s.retarget.scale;

  const auto ln = static_cast<Eigen::Index>(s.leader.dof());
  if (kp.size() == 0) {
    kp = VecX::Constant(ln, kLeaderKp);
    kd = VecX::Constant(ln, kLeaderKd);
    kp_max = kp * kLeaderGainHeadroom;
    kd_max = kd * kLeaderGainHeadroom;
  }
  s.leader_gains = Gains{kp, kd};
  s.feedback.kp_max = kp_max;
  s.feedback.kd_max = kd_max;
  s.leader_home = leader_home.size() ? leader_home : s.leader.clamp_to_limits(VecX::Zero(ln));
  s.follower_home = follower_home.size()
                        ? follower_home
                        : s.follower.clamp_to_limits(VecX::Zero(static_cast<Eigen::Index>(s.follower.dof())));
  s.orientation_source.normalize();

  try {
    s.path = OperatorPath(waypoints);
  } catch (const std::exception& e) {
    issues.emplace_back(std::string("[waypoint]: ") + e.what());
  }

  if (issues.empty()) {
    auto semantic = validate_scenario(s);
    issues.insert(issues.end(), semantic.begin(), semantic.end());
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.parent_path());
}

void set_tick_rate(Scenario& s, int tick_rate) {
  s.tick_rate = tick_rate;
  auto issues = validate_scenario(s);
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

ChannelModel command_channel(const Scenario& s) {
  ChannelModel m = s.channel;
  m.rng_seed = derive_seed(s.seed, 1);
  return m;
}

ChannelModel state_channel(const Scenario& s) {
  ChannelModel m = s.channel;
  m.rng_seed = derive_seed(s.seed, 2);
  return m;
}

}  // namespace teleop
