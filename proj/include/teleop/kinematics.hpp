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

#include <optional>
#include <vector>

#include "teleop/arm_model.hpp"
#include "teleop/types.hpp"

namespace teleop {

/// World-frame quantities of every joint for one configuration.
struct ChainFrames {
  std::vector<Vec3> joint_origin;    // point on joint i's axis
  std::vector<Vec3> joint_axis;      // unit axis of joint i
  std::vector<Mat3> link_rotation;   // frame of link i (after joint i rotates)
  Pose ee;
};

ChainFrames compute_frames(const KinematicChain& chain, const VecX& q);

/// Pose of the ee_offset point in the base frame. Throws
/// std::invalid_argument on dimension mismatch.
Pose forward_kinematics(const KinematicChain& chain, const VecX& q);

using Jacobian = Eigen::Matrix<double, 6, Eigen::Dynamic>;

/// Geometric Jacobian at the end-effector: rows 0..2 linear, 3..5 angular.
Jacobian jacobian(const KinematicChain& chain, const VecX& q);
Jacobian jacobian(const ChainFrames& frames);

/// 3xn positional Jacobian of a point rigidly attached to link `link`.
Eigen::Matrix<double, 3, Eigen::Dynamic> point_jacobian(const ChainFrames& frames, std::size_t link,
                                                        const Vec3& world_point);

/// Rotation vector taking `current` onto `target` (log of target * current^-1),
/// expressed in the base frame.
Vec3 orientation_error(const Quat& target, const Quat& current);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

/// Heading of a target projected onto the base plane. Empty when the target
/// lies on the base axis (within `epsilon`), which disables the yaw task.
std::optional<double> base_yaw_reference(const Vec3& target, double epsilon = 1e-6);

struct ElbowResidual {
  double residual = 0.0;  // max(0, ref - z_elbow), metres
  double elbow_z = 0.0;
  VecX gradient;          // d residual / d q; zero when satisfied
};

/// One-sided height constraint on the origin of joint `elbow_joint_index`
/// (zero-based). Throws std::out_of_range for a bad index.
ElbowResidual elbow_z_residual(const KinematicChain& chain, const VecX& q, std::size_t elbow_joint_index,
                               double elbow_z_ref);

struct IkTaskWeights {
  double w_position = 1.0;
  double w_orientation = 1.0;
  double w_base_yaw = 0.0;
  double w_elbow = 0.0;
};

struct IkParams {
  double damping = 0.05;          // lambda
  int max_iterations = 100;
  double position_tol = 1e-4;     // m
  double orientation_tol = 1e-3;  // rad
  double step_clamp = 0.2;        // rad per iteration, infinity norm
  double elbow_z_ref = 0.45;      // m
  std::size_t elbow_joint_index = 3;
};

/// Throws std::invalid_argument when weights/params violate their invariants.
void validate_ik_settings(const IkTaskWeights& weights, const IkParams& params);

struct IkReport {
  bool converged = false;
  int iterations = 0;
  double position_residual = 0.0;     // m
  double orientation_residual = 0.0;  // rad; 0 when orientation is not weighted
  double yaw_residual = 0.0;          // rad, wrapped
  double elbow_residual = 0.0;        // m
  bool yaw_task_active = false;
};

struct IkResult {
  VecX q;
  IkReport report;
};

/// Damped least squares on the stacked, weighted residual
///   [position; orientation; base yaw; elbow height].
/// The full stack is iterated until its step settles (or half the iteration
/// budget is spent); the yaw and elbow rows are then dropped and the pose is
/// polished to tolerance from that compromise. A seed that already meets
/// tolerance is returned unchanged. Non-convergence is reported, never
/// thrown. The returned joints are always within limits.
IkResult solve_ik(const KinematicChain& chain, const Pose& target, const VecX& seed, const IkTaskWeights& weights,
                  const IkParams& params);

struct RetargetMap {
  double scale = 1.0;
  Vec3 leader_origin = Vec3::Zero();
  Vec3 follower_origin = Vec3::Zero();
  Quat rotation = Quat::Identity();
};

void validate_retarget(const RetargetMap& map);

/// Leader workspace -> follower workspace. Position goes through the affine
/// map; orientation comes from `orientation_source` unchanged.
Pose retarget(const Pose& leader_pose, const Quat& orientation_source, const RetargetMap& map);

/// Maps a follower-frame displacement back into leader-frame units.
Vec3 follower_to_leader_displacement(const Vec3& follower_delta, const RetargetMap& map);

}  // namespace teleop
