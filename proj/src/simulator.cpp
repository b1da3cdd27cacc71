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

#include "teleop/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace teleop {

namespace {

int substeps_for(double dt, double max_substep) {
  if (!(dt > 0.0)) throw std::invalid_argument("simulator: dt must be > 0");
  return std::max(1, static_cast<int>(std::ceil(dt / max_substep - 1e-9)));
}

// Keeps q inside the limits and kills velocity pushing outward.
void saturate(const KinematicChain& chain, VecX& q, VecX& qd) {
  for (std::size_t i = 0; i < chain.dof(); ++i) {
    const auto& j = chain.joints[i];
    const Eigen::Index k = static_cast<Eigen::Index>(i);
    qd[k] = std::clamp(qd[k], -j.max_velocity, j.max_velocity);
    if (q[k] < j.limits.min) {
      q[k] = j.limits.min;
      qd[k] = std::max(qd[k], 0.0);
    } else if (q[k] > j.limits.max) {
      q[k] = j.limits.max;
      qd[k] = std::min(qd[k], 0.0);
    }
  }
}

}  // namespace

std::vector<std::string> validate_world(const World& world) {
  std::vector<std::string> issues;
  for (std::size_t i = 0; i < world.half_spaces.size(); ++i) {
    const auto& h = world.half_spaces[i];
    const std::string tag = "obstacle " + std::to_string(i + 1) + (h.name.empty() ? "" : " (" + h.name + ")");
    if (std::abs(h.normal.norm() - 1.0) > 1e-9) issues.push_back(tag + ": normal must have unit norm");
    if (!(h.stiffness > 0.0)) issues.push_back(tag + ": stiffness must be > 0");
    if (!(h.damping >= 0.0)) issues.push_back(tag + ": damping must be >= 0");
    if (!std::isfinite(h.offset)) issues.push_back(tag + ": offset must be finite");
  }
  return issues;
}

Contact contact_force(const World& world, const Vec3& position, const Vec3& velocity) {
  Contact c;
  for (const auto& h : world.half_spaces) {
    const double depth = h.offset - h.normal.dot(position);
    if (depth <= 0.0) continue;
    c.in_contact = true;
    const double mag = h.stiffness * depth - h.damping * h.normal.dot(velocity);
    if (mag > 0.0) c.force += mag * h.normal;
  }
  return c;
}

FollowerSimState make_follower_state(const KinematicChain& chain, const VecX& q, double dt) {
  FollowerSimState s;
  s.joint_state.q = q;
  s.joint_state.qd = VecX::Zero(q.size());
  s.joint_state.dt = dt;
  s.applied_target = q;
  s.ee_pose = forward_kinematics(chain, q);
  return s;
}

FollowerSimState step_follower(const KinematicChain& chain, const FollowerSimState& state, const VecX& q_target,
                               const VecX& qd_feedforward, const World& world, const FollowerControl& control,
                               double dt) {
  const auto n = static_cast<Eigen::Index>(chain.dof());
  if (q_target.size() != n || state.joint_state.q.size() != n) {
    throw std::invalid_argument("step_follower: dimension mismatch");
  }
  const VecX ff = qd_feedforward.size() == n ? qd_feedforward : VecX::Zero(n);
  const int steps = substeps_for(dt, control.max_substep);
  const double h = dt / steps;
  const double w = control.bandwidth;

  // Diagonal inertia is frozen over the tick; it only scales the tracking law.
  const VecX inertia = mass_matrix(chain, state.joint_state.q).diagonal().array() + control.armature;
  VecX max_tau(n);
  for (Eigen::Index i = 0; i < n; ++i) max_tau[i] = chain.joints[static_cast<std::size_t>(i)].max_torque;

  FollowerSimState out = state;
  VecX& q = out.joint_state.q;
  VecX& qd = out.joint_state.qd;
  Contact contact;
  for (int s = 0; s < steps; ++s) {
    const ChainFrames frames = compute_frames(chain, q);
    const Eigen::Matrix<double, 3, Eigen::Dynamic> jv = jacobian(frames).topRows<3>();
    contact = contact_force(world, frames.ee.position, jv * qd);
    const VecX accel = w * w * (q_target - q) + 2.0 * w * (ff - qd);
    const VecX tau_track = inertia.cwiseProduct(accel).cwiseMax(-max_tau).cwiseMin(max_tau);
    const VecX qdd = (tau_track + jv.transpose() * contact.force).cwiseQuotient(inertia);
    qd += h * qdd;
    q += h * qd;
    saturate(chain, q, qd);
  }
  out.joint_state.tick = state.joint_state.tick + 1;
  out.joint_state.dt = dt;
  out.applied_target = q_target;
  out.ee_pose = forward_kinematics(chain, q);
  out.contact = contact;
  return out;
}

LeaderStep step_leader(const KinematicChain& chain, const JointState& state, const OperatorModel& op,
                       const std::optional<HandInput>& hand, const Pose& virtual_target, const Gains& gains,
                       const LeaderModel& model) {
  const auto n = static_cast<Eigen::Index>(chain.dof());
  if (state.q.size() != n || state.qd.size() != n) throw std::invalid_argument("step_leader: dimension mismatch");
  const int steps = substeps_for(state.dt, model.max_substep);
  const double h = state.dt / steps;

  const IkResult ik = solve_ik(chain, virtual_target, chain.clamp_to_limits(state.q),
                               IkTaskWeights{1.0, 0.0, 0.0, 0.0}, model.ik);

  LeaderStep out;
  out.state = state;
  out.q_virtual = ik.q;
  VecX& q = out.state.q;
  VecX& qd = out.state.qd;
  for (int s = 0; s < steps; ++s) {
    const ChainFrames frames = compute_frames(chain, q);
    const Eigen::Matrix<double, 3, Eigen::Dynamic> jv = jacobian(frames).topRows<3>();
    VecX tau = pd_torque(gains, ik.q - q, qd) + gravity_torque(chain, q) + friction_compensation(chain, qd);
    if (hand) {
      const Vec3 f = op.hand_stiffness * (hand->position - frames.ee.position) +
                     op.hand_damping * (hand->velocity - jv * qd);
      tau += jv.transpose() * f;
    }
    const VecX qdd = forward_dynamics(chain, q, qd, tau, model.armature, true);
    qd += h * qdd;
    q += h * qd;
    saturate(chain, q, qd);
  }
  out.state.tick = state.tick + 1;
  out.ee_pose = forward_kinematics(chain, q);
  if (hand) out.rendered_force = op.hand_stiffness * (out.ee_pose.position - hand->position);
  return out;
}

}  // namespace teleop
