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

#include "teleop/dynamics.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>
#include <string>

#include "teleop/kinematics.hpp"

namespace teleop {

namespace {

void check_len(const KinematicChain& chain, const VecX& v, const char* what) {
  if (static_cast<std::size_t>(v.size()) != chain.dof()) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(chain.dof()) +
                                " entries, got " + std::to_string(v.size()));
  }
}

// Point-mass recursive Newton-Euler in world coordinates.
VecX rnea(const KinematicChain& chain, const VecX& q, const VecX& qd, const VecX& qdd, const Vec3& gravity) {
  const ChainFrames f = compute_frames(chain, q);
  const std::size_t n = chain.dof();

  std::vector<Vec3> com(n), force(n);
  Vec3 w = Vec3::Zero();
  Vec3 wd = Vec3::Zero();
  Vec3 a_origin = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    if (i > 0) {
      const Vec3 r = f.joint_origin[i] - f.joint_origin[i - 1];
      a_origin = a_origin + wd.cross(r) + w.cross(w.cross(r));
    }
    const Vec3& z = f.joint_axis[i];
    const Vec3 w_prev = w;
    w = w_prev + z * qd[k];
    wd = wd + z * qdd[k] + w_prev.cross(z * qd[k]);

    com[i] = f.joint_origin[i] + f.link_rotation[i] * chain.joints[i].com;
    const Vec3 rc = com[i] - f.joint_origin[i];
    const Vec3 a_com = a_origin + wd.cross(rc) + w.cross(w.cross(rc));
    force[i] = chain.joints[i].mass * (a_com - gravity);
  }

  VecX tau(static_cast<Eigen::Index>(n));
  Vec3 F = Vec3::Zero();  // net force carried by links i+1..n
  Vec3 N = Vec3::Zero();  // net moment about joint origin i+1
  for (std::size_t idx = n; idx-- > 0;) {
    Vec3 moment = (com[idx] - f.joint_origin[idx]).cross(force[idx]);
    if (idx + 1 < n) moment += N + (f.joint_origin[idx + 1] - f.joint_origin[idx]).cross(F);
    F = force[idx] + F;
    N = moment;
    tau[static_cast<Eigen::Index>(idx)] = f.joint_axis[idx].dot(N);
  }
  return tau;
}

}  // namespace

void validate_gains(const Gains& g) {
  if (g.kp.size() != g.kd.size()) throw std::invalid_argument("gains: kp and kd lengths differ");
  if (!g.kp.allFinite() || !g.kd.allFinite() || (g.kp.array() < 0.0).any() || (g.kd.array() < 0.0).any()) {
    throw std::invalid_argument("gains: entries must be finite and >= 0");
  }
}

VecX gravity_torque(const KinematicChain& chain, const VecX& q) {
  check_len(chain, q, "gravity_torque");
  const VecX zero = VecX::Zero(q.size());
  return rnea(chain, q, zero, zero, chain.gravity);
}

VecX friction_compensation(const KinematicChain& chain, const VecX& qd) {
  check_len(chain, qd, "friction_compensation");
  VecX tau(qd.size());
  for (Eigen::Index i = 0; i < qd.size(); ++i) {
    const auto& j = chain.joints[static_cast<std::size_t>(i)];
    tau[i] = j.viscous_friction * qd[i] + j.coulomb_friction * std::tanh(qd[i] / kFrictionSmoothingVelocity);
  }
  return tau;
}

VecX inverse_dynamics(const KinematicChain& chain, const VecX& q, const VecX& qd, const VecX& qdd) {
  check_len(chain, q, "inverse_dynamics");
  check_len(chain, qd, "inverse_dynamics");
  check_len(chain, qdd, "inverse_dynamics");
  return rnea(chain, q, qd, qdd, chain.gravity);
}

VecX pd_torque(const Gains& gains, const VecX& q_err, const VecX& qd) {
  if (gains.kp.size() != q_err.size() || gains.kd.size() != qd.size() || q_err.size() != qd.size()) {
    throw std::invalid_argument("pd_torque: length mismatch");
  }
  return gains.kp.cwiseProduct(q_err) - gains.kd.cwiseProduct(qd);
}

MatX mass_matrix(const KinematicChain& chain, const VecX& q) {
  check_len(chain, q, "mass_matrix");
  const auto n = q.size();
  MatX M(n, n);
  const VecX zero = VecX::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    M.col(j) = rnea(chain, q, zero, VecX::Unit(n, j), Vec3::Zero());
  }
  return 0.5 * (M + M.transpose());
}

VecX forward_dynamics(const KinematicChain& chain, const VecX& q, const VecX& qd, const VecX& tau,
                      double armature, bool with_friction) {
  check_len(chain, tau, "forward_dynamics");
  MatX M = mass_matrix(chain, q);
  M.diagonal().array() += armature;
  VecX bias = rnea(chain, q, qd, VecX::Zero(q.size()), chain.gravity);
  if (with_friction) bias += friction_compensation(chain, qd);
  return M.ldlt().solve(tau - bias);
}

}  // namespace teleop
