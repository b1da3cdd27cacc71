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

// Plant models closing the teleoperation loop: a follower arm that tracks
// joint targets in joint space and touches penalty half-spaces, and a leader
// arm with full point-mass dynamics held by a spring-damper hand.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "teleop/arm_model.hpp"
#include "teleop/dynamics.hpp"
#include "teleop/kinematics.hpp"
#include "teleop/types.hpp"

namespace teleop {

/// Solid region {p : normal . p < offset}. `normal` points out of the
/// obstacle into free space.
struct HalfSpace {
  std::string name;
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;         // m
  double stiffness = 5000.0;   // N/m
  double damping = 50.0;       // N*s/m
  bool visible = true;         // scenario semantics only; hidden ones are never sent to a UI
};

struct World {
  std::vector<HalfSpace> half_spaces;
};

/// Every violated invariant of the world (empty when valid).
std::vector<std::string> validate_world(const World& world);

struct Contact {
  Vec3 force = Vec3::Zero();  // N, on the end-effector
  bool in_contact = false;
};

/// Sum of penalty forces max(0, k * depth - d * (n . v)) * n over all
/// penetrated half-spaces.
Contact contact_force(const World& world, const Vec3& position, const Vec3& velocity);

struct FollowerControl {
  double bandwidth = 40.0;        // rad/s, critically damped tracking
  double armature = 0.05;         // kg*m^2 added to each diagonal inertia
  double max_substep = 0.001;     // s
  /// Share of the command-rate velocity fed forward by the teleop loop.
  /// Below 1 the follower trails its command instead of leading it.
  double feedforward_gain = 0.9;
};

struct FollowerSimState {
  JointState joint_state;
  VecX applied_target;
  Pose ee_pose;
  Contact contact;
};

FollowerSimState make_follower_state(const KinematicChain& chain, const VecX& q, double dt);

/// Advances the follower by `dt`. Each joint is driven toward `q_target`
/// (with velocity feedforward `qd_feedforward`, may be empty) by a critically
/// damped law whose torque saturates at max_torque; contact forces enter
/// through the Jacobian transpose. Velocities saturate at max_velocity and
/// positions at the joint limits. Never throws on saturation.
FollowerSimState step_follower(const KinematicChain& chain, const FollowerSimState& state, const VecX& q_target,
                               const VecX& qd_feedforward, const World& world, const FollowerControl& control,
                               double dt);

/// Operator hand modelled as a spring-damper attached to the leader
/// end-effector.
struct OperatorModel {
  double hand_stiffness = 500.0;  // N/m
  double hand_damping = 20.0;     // N*s/m
};

struct HandInput {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
};

struct LeaderModel {
  double armature = 0.002;       // kg*m^2
  double max_substep = 0.001;    // s
  IkParams ik{0.05, 50, 1e-6, 1e-3, 0.2, 0.0, 0};
};

struct LeaderStep {
  JointState state;
  VecX q_virtual;             // IK solution for the virtual target
  Vec3 rendered_force = Vec3::Zero();  // force on the hand, N
  Pose ee_pose;
};

/// Advances the leader by state.dt under
///   tau = pd(gains, IK(virtual_target) - q, qd) + gravity + friction comp
/// plus the hand spring when a hand is present. rendered_force is the hand
/// spring deflection force k_h * (leader_ee - hand), zero without a hand.
LeaderStep step_leader(const KinematicChain& chain, const JointState& state, const OperatorModel& op,
                       const std::optional<HandInput>& hand, const Pose& virtual_target, const Gains& gains,
                       const LeaderModel& model);

}  // namespace teleop
