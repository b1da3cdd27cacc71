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

// Force-feedback teleoperation loop. Per tick:
//
//   operator hand -> leader EE (FK) -> retarget -> follower IK -> command
//   frame -> channel -> follower step -> state frame -> channel -> dee ->
//   factor -> virtual target + gains -> leader step
//
// Leader and follower only share encoded protocol frames.

#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <utility>
#include <vector>

#include "teleop/channel.hpp"
#include "teleop/feedback.hpp"
#include "teleop/protocol.hpp"
#include "teleop/scenario.hpp"
#include "teleop/simulator.hpp"

namespace teleop {

struct TraceRecord {
  std::int64_t tick = 0;
  double time = 0.0;
  bool operator_present = false;
  Vec3 hand_position = Vec3::Zero();
  Pose leader_ee;
  Pose follower_target;
  Pose follower_actual;
  Vec3 delta_ee = Vec3::Zero();
  Vec3 v_cartesian = Vec3::Zero();
  double factor = 0.0;
  Vec3 virtual_target = Vec3::Zero();
  VecX kp;
  VecX kd;
  Vec3 contact_force_truth = Vec3::Zero();
  bool in_contact = false;
  Vec3 rendered_force = Vec3::Zero();
  VecX leader_q;
  VecX follower_q;
  std::uint32_t applied_seq = 0;
  bool ik_converged = true;
};

bool operator==(const TraceRecord& a, const TraceRecord& b);

/// One operator input: leader-frame hand position/velocity and the
/// orientation source for the follower.
struct OperatorSample {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Quat orientation = Quat::Identity();
};

OperatorSample scripted_sample(const Scenario& s, double t);

/// Stateful loop for externally paced input (scripted or streamed).
class TeleopSession {
 public:
  /// Validates the scenario and places both arms at the pose of the first
  /// hand sample (scripted path start) with zero deviation.
  explicit TeleopSession(const Scenario& scenario);

  /// Advances one tick. An empty sample means no fresh operator input: the
  /// last pose is held for stale_timeout_ticks, after which the hand is
  /// treated as released and no further commands are sent.
  TraceRecord step(const std::optional<OperatorSample>& sample);

  /// Marks the operator as gone immediately (e.g. UI disconnect).
  void release_operator();

  std::int64_t tick() const { return tick_; }
  const Scenario& scenario() const { return scenario_; }
  const FollowerSimState& follower() const { return follower_; }
  const JointState& leader() const { return leader_; }

 private:
  void follower_side(std::vector<protocol::Frame> delivered);
  const Pose& target_for_seq(std::uint32_t seq) const;

  Scenario scenario_;
  std::int64_t tick_ = 0;

  // Leader endpoint.
  JointState leader_;
  std::optional<OperatorSample> last_sample_;
  std::int64_t operator_age_ = 0;
  bool operator_released_ = false;
  VecX follower_ik_q_;
  bool last_ik_converged_ = true;
  std::uint32_t next_seq_ = 1;
  Pose initial_target_;
  Pose last_target_;
  std::deque<std::pair<std::uint32_t, Pose>> sent_targets_;
  std::optional<protocol::FollowerState> latest_state_;

  // Follower endpoint.
  FollowerSimState follower_;
  protocol::SequenceGate gate_;
  std::optional<protocol::LeaderCommand> applied_;
  std::int64_t applied_tick_ = 0;
  VecX feedforward_;
  bool soft_stopped_ = true;
  VecX hold_target_;

  Channel to_follower_;
  Channel to_leader_;
};

/// Runs the scripted scenario for its full duration.
std::vector<TraceRecord> run_teleop_loop(const Scenario& scenario);

}  // namespace teleop
