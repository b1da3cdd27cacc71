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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "teleop/arm_model.hpp"
#include "teleop/channel.hpp"
#include "teleop/dynamics.hpp"
#include "teleop/feedback.hpp"
#include "teleop/kinematics.hpp"
#include "teleop/simulator.hpp"

namespace teleop {

struct Waypoint {
  double time = 0.0;  // s
  Vec3 position = Vec3::Zero();  // leader frame, m
};

/// Scripted hand trajectory: minimum-jerk segments between waypoints, held
/// at the first/last waypoint outside their time span.
class OperatorPath {
 public:
  OperatorPath() = default;
  explicit OperatorPath(std::vector<Waypoint> waypoints);

  Vec3 position(double t) const;
  Vec3 velocity(double t) const;
  const std::vector<Waypoint>& waypoints() const { return waypoints_; }

 private:
  std::vector<Waypoint> waypoints_;
};

struct Scenario {
  std::string name;
  std::filesystem::path leader_chain_path;
  std::filesystem::path follower_chain_path;
  KinematicChain leader;
  KinematicChain follower;

  double duration = 10.0;  // s
  int tick_rate = 200;     // Hz
  std::uint64_t seed = 0;
  int stale_timeout_ticks = protocol::kDefaultStaleTimeoutTicks;

  RetargetMap retarget;
  FeedbackParams feedback;
  IkTaskWeights follower_weights{1.0, 0.5, 0.001, 0.01};
  IkParams follower_ik;

  Gains leader_gains;
  LeaderModel leader_model;
  VecX leader_home;
  FollowerControl follower_control;
  VecX follower_home;

  OperatorModel operator_model;
  OperatorPath path;
  Quat orientation_source = Quat::Identity();
  double gripper = 0.0;

  World world;
  ChannelModel channel;  // applied to both directions, with derived seeds

  double dt() const { return 1.0 / tick_rate; }
  std::int64_t ticks() const;
};

/// Every invariant violation of an assembled scenario (empty when valid).
std::vector<std::string> validate_scenario(const Scenario& s);

/// Parses scenario text; chain paths resolve against `base_dir`. Throws
/// ConfigSyntaxError / ConfigError, and std::runtime_error when a chain file
/// cannot be read.
Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& path);

/// Applies per-run overrides and re-validates.
void set_tick_rate(Scenario& s, int tick_rate);

/// Seeds of the leader->follower and follower->leader channels.
ChannelModel command_channel(const Scenario& s);
ChannelModel state_channel(const Scenario& s);

}  // namespace teleop
