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

#include "teleop/kinematics.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace teleop {

namespace {

constexpr double kSettleStep = 1e-5;  // rad
constexpr int kPolishStall = 1000000;

void check_dims(const KinematicChain& chain, const VecX& q, const char* what) {
  if (static_cast<std::size_t>(q.size()) != chain.dof()) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(chain.dof()) +
                                " joint values, got " + std::to_string(q.size()));
  }
}

}  // namespace

ChainFrames compute_frames(const KinematicChain& chain, const VecX& q) {
  check_dims(chain, q, "compute_frames");
  const std::size_t n = chain.dof();
  ChainFrames f;
  f.joint_origin.resize(n);
  f.joint_axis.resize(n);
  f.link_rotation.resize(n);

  Mat3 R = Mat3::Identity();
  Vec3 p = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& j = chain.joints[i];
    p = p + R * j.origin_translation;
    R = R * j.origin_rotation.toRotationMatrix();
    f.joint_origin[i] = p;
    f.joint_axis[i] = R * j.axis;
    R = R * Eigen::AngleAxisd(q[static_cast<Eigen::Index>(i)], j.axis).toRotationMatrix();
    f.link_rotation[i] = R;
  }
  f.ee.position = p + R * chain.ee_offset;
  f.ee.orientation = Quat(R).normalized();
  return f;
}

Pose forward_kinematics(const KinematicChain& chain, const VecX& q) { return compute_frames(chain, q).ee; }

Jacobian jacobian(const ChainFrames& frames) {
  const auto n = static_cast<Eigen::Index>(frames.joint_axis.size());
  Jacobian J(6, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3& z = frames.joint_axis[static_cast<std::size_t>(i)];
    J.block<3, 1>(0, i) = z.cross(frames.ee.position - frames.joint_origin[static_cast<std::size_t>(i)]);
    J.block<3, 1>(3, i) = z;
  }
  return J;
}

Jacobian jacobian(const KinematicChain& chain, const VecX& q) { return jacobian(compute_frames(chain, q)); }

Eigen::Matrix<double, 3, Eigen::Dynamic> point_jacobian(const ChainFrames& frames, std::size_t moving_joints,
                                                        const Vec3& world_point) {
  const auto n = static_cast<Eigen::Index>(frames.joint_axis.size());
  Eigen::Matrix<double, 3, Eigen::Dynamic> J = Eigen::Matrix<double, 3, Eigen::Dynamic>::Zero(3, n);
  for (std::size_t i = 0; i < moving_joints && i < frames.joint_axis.size(); ++i) {
    J.col(static_cast<Eigen::Index>(i)) = frames.joint_axis[i].cross(world_point - frames.joint_origin[i]);
  }
  return J;
}

Vec3 orientation_error(const Quat& target, const Quat& current) {
  Quat d = target * current.conjugate();
  if (d.w() < 0.0) d.coeffs() = -d.coeffs();
  const Vec3 v = d.vec();
  const double s = v.norm();
  if (s < 1e-12) return 2.0 * v;
  const double angle = 2.0 * std::atan2(s, d.w());
  return v * (angle / s);
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, two_pi);
  if (a <= 0.0) a += two_pi;
  return a - std::numbers::pi;
}

std::optional<double> base_yaw_reference(const Vec3& target, double epsilon) {
  if (target.x() * target.x() + target.y() * target.y() <= epsilon * epsilon) return std::nullopt;
  return std::atan2(target.y(), target.x());
}

ElbowResidual elbow_z_residual(const KinematicChain& chain, const VecX& q, std::size_t elbow_joint_index,
                               double elbow_z_ref) {
  if (elbow_joint_index >= chain.dof()) {
    throw std::out_of_range("elbow_joint_index " + std::to_string(elbow_joint_index) + " out of range for " +
                            std::to_string(chain.dof()) + "-joint chain");
  }
  const ChainFrames f = compute_frames(chain, q);
  ElbowResidual out;
  out.elbow_z = f.joint_origin[elbow_joint_index].z();
  out.gradient = VecX::Zero(q.size());
  const double gap = elbow_z_ref - out.elbow_z;
  if (gap > 0.0) {
    out.residual = gap;
    out.gradient = -point_jacobian(f, elbow_joint_index, f.joint_origin[elbow_joint_index]).row(2).transpose();
  }
  return out;
}

void validate_ik_settings(const IkTaskWeights& weights, const IkParams& params) {
  if (!(weights.w_position > 0.0)) throw std::invalid_argument("IK: w_position must be > 0");
  if (!(weights.w_orientation >= 0.0) || !(weights.w_base_yaw >= 0.0) || !(weights.w_elbow >= 0.0)) {
    throw std::invalid_argument("IK: task weights must be >= 0");
  }
  if (!(params.damping > 0.0)) throw std::invalid_argument("IK: damping must be > 0");
  if (!(params.position_tol > 0.0) || !(params.orientation_tol > 0.0)) {
    throw std::invalid_argument("IK: tolerances must be > 0");
  }
  if (!(params.step_clamp > 0.0)) throw std::invalid_argument("IK: step_clamp must be > 0");
  if (params.max_iterations < 0) throw std::invalid_argument("IK: max_iterations must be >= 0");
}

IkResult solve_ik(const KinematicChain& chain, const Pose& target, const VecX& seed, const IkTaskWeights& weights,
                  const IkParams& params) {
  validate_ik_settings(weights, params);
  check_dims(chain, seed, "solve_ik");
  if (!chain.within_limits(seed)) throw std::invalid_argument("solve_ik: seed outside joint limits");
  if (weights.w_elbow > 0.0 && params.elbow_joint_index >= chain.dof()) {
    throw std::out_of_range("solve_ik: elbow_joint_index out of range");
  }

  const auto n = static_cast<Eigen::Index>(chain.dof());
  const bool use_orientation = weights.w_orientation > 0.0;
  const auto yaw_ref = weights.w_base_yaw > 0.0 ? base_yaw_reference(target.position) : std::nullopt;
  const double lambda_sq = params.damping * params.damping;

  IkResult result;
  result.q = seed;
  IkReport& rep = result.report;
  rep.yaw_task_active = yaw_ref.has_value();

  MatX J(8, n);
  VecX r(8);
  // The weighted stack is iterated until it settles; the secondary rows are
  // then dropped and the pose is polished from that compromise. Tolerance is
  // only tested before the first step and while polishing. A stalled polish
  // restarts once from the seed with the pose rows alone.
  bool polish = false;
  bool restarted = false;
  int polish_start = -1;
  const int stack_budget = params.max_iterations / 2;
  for (int iter = 0;; ++iter) {
    const ChainFrames f = compute_frames(chain, result.q);
    const Vec3 e_pos = target.position - f.ee.position;
    const Vec3 e_ori = use_orientation ? orientation_error(target.orientation, f.ee.orientation) : Vec3::Zero();
    rep.position_residual = e_pos.norm();
    rep.orientation_residual = e_ori.norm();
    rep.yaw_residual = yaw_ref ? wrap_angle(*yaw_ref - result.q[0]) : 0.0;
    const double elbow_z = weights.w_elbow > 0.0 ? f.joint_origin[params.elbow_joint_index].z() : 0.0;
    rep.elbow_residual = weights.w_elbow > 0.0 ? std::max(0.0, params.elbow_z_ref - elbow_z) : 0.0;
    rep.converged = rep.position_residual < params.position_tol &&
                    (!use_orientation || rep.orientation_residual < params.orientation_tol);
    rep.iterations = iter;
    if (!yaw_ref && rep.elbow_residual == 0.0) polish = true;
    if ((rep.converged && (iter == 0 || polish)) || iter >= params.max_iterations) break;
    if (iter >= stack_budget) polish = true;
    if (polish && polish_start < 0) polish_start = iter;
    if (polish && !restarted && polish_start > 0 && iter - polish_start >= kPolishStall) {
      restarted = true;
      result.q = seed;
      continue;
    }

    const Jacobian Jee = jacobian(f);
    Eigen::Index rows = 0;
    J.topRows<3>() = weights.w_position * Jee.topRows<3>();
    r.head<3>() = weights.w_position * e_pos;
    rows = 3;
    if (use_orientation) {
      J.middleRows<3>(rows) = weights.w_orientation * Jee.bottomRows<3>();
      r.segment<3>(rows) = weights.w_orientation * e_ori;
      rows += 3;
    }
    if (yaw_ref && !polish) {
      J.row(rows).setZero();
      J(rows, 0) = weights.w_base_yaw;
      r[rows] = weights.w_base_yaw * rep.yaw_residual;
      ++rows;
    }
    if (rep.elbow_residual > 0.0 && !polish) {
      const auto Jp = point_jacobian(f, params.elbow_joint_index, f.joint_origin[params.elbow_joint_index]);
      J.row(rows) = weights.w_elbow * Jp.row(2);
      r[rows] = weights.w_elbow * rep.elbow_residual;
      ++rows;
    }

    const auto Js = J.topRows(rows);
    MatX A = Js.transpose() * Js;
    A.diagonal().array() += lambda_sq;
    VecX dq = A.ldlt().solve(Js.transpose() * r.head(rows));
    const double peak = dq.cwiseAbs().maxCoeff();
    if (peak < kSettleStep) polish = true;
    if (peak > params.step_clamp) dq *= params.step_clamp / peak;
    result.q = chain.clamp_to_limits(result.q + dq);
  }
  return result;
}

void validate_retarget(const RetargetMap& map) {
  if (!std::isfinite(map.scale) || !(map.scale > 0.0)) throw std::invalid_argument("retarget: scale must be > 0");
  if (std::abs(map.rotation.norm() - 1.0) > 1e-9) throw std::invalid_argument("retarget: rotation must be unit");
}

Pose retarget(const Pose& leader_pose, const Quat& orientation_source, const RetargetMap& map) {
  Pose out;
  out.position = map.rotation * (map.scale * (leader_pose.position - map.leader_origin)) + map.follower_origin;
  out.orientation = orientation_source;
  return out;
}

Vec3 follower_to_leader_displacement(const Vec3& follower_delta, const RetargetMap& map) {
  return map.rotation.conjugate() * follower_delta / map.scale;
}

}  // namespace teleop
