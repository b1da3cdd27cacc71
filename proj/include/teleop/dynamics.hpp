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

// Rigid-chain dynamics with point-mass links. Used for gravity/friction
// compensation and inverse dynamics in the soft-controller pipeline, and as
// the plant model for the simulated leader.

#pragma once

#include <cstdint>

#include "teleop/arm_model.hpp"
#include "teleop/types.hpp"

namespace teleop {

/// Joint-space impedance gains.
struct Gains {
  VecX kp;  // N*m/rad
  VecX kd;  // N*m*s/rad
};

void validate_gains(const Gains& g);

struct JointState {
  VecX q;
  VecX qd;
  std::int64_t tick = 0;
  double dt = 0.005;
};

/// Coulomb smoothing velocity for friction compensation, rad/s.
inline constexpr double kFrictionSmoothingVelocity = 0.01;

/// dU/dq for U = sum m_j * (-g) . c_j(q). This is the motor torque that
/// holds the chain static, and it equals inverse_dynamics(q, 0, 0) exactly.
VecX gravity_torque(const KinematicChain& chain, const VecX& q);

/// viscous * qd + coulomb * tanh(qd / 0.01) per joint.
VecX friction_compensation(const KinematicChain& chain, const VecX& qd);

/// Recursive Newton-Euler torques for a desired motion.
VecX inverse_dynamics(const KinematicChain& chain, const VecX& q, const VecX& qd, const VecX& qdd);

/// tau = kp .* q_err - kd .* qd
VecX pd_torque(const Gains& gains, const VecX& q_err, const VecX& qd);

/// Joint-space inertia, built column by column from inverse dynamics.
MatX mass_matrix(const KinematicChain& chain, const VecX& q);

/// qdd for applied motor torque `tau`. `armature` adds reflected rotor
/// inertia on the diagonal; `with_friction` applies the chain's
/// viscous + Coulomb model as plant friction.
VecX forward_dynamics(const KinematicChain& chain, const VecX& q, const VecX& qd, const VecX& tau,
                      double armature, bool with_friction);

}  // namespace teleop
