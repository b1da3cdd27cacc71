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


// Test-only reference implementations. Each one is written from first
// principles and shares no code path with the library it checks.

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "teleop/arm_model.hpp"

namespace oracle {

using Mat4 = Eigen::Matrix4d;

/// Rotation about a unit axis by explicit Rodrigues expansion.
Eigen::Matrix3d rodrigues(const Eigen::Vector3d& axis, double angle);

/// Rotation matrix of a (not necessarily normalized) quaternion given as
/// x, y, z, w.
Eigen::Matrix3d quat_matrix(double x, double y, double z, double w);

Mat4 homogeneous(const Eigen::Matrix3d& R, const Eigen::Vector3d& p);

/// Base-to-tip product of per-joint homogeneous transforms
/// T_i = Trans(origin) * Rot(origin_rotation) * Rot(axis, q_i); the last
/// factor is Trans(ee_offset).
Mat4 fk_transform(const teleop::KinematicChain& chain, const Eigen::VectorXd& q);

/// World position of each link's point mass.
std::vector<Eigen::Vector3d> com_positions(const teleop::KinematicChain& chain, const Eigen::VectorXd& q);

/// World position of joint `index`'s origin.
Eigen::Vector3d joint_origin(const teleop::KinematicChain& chain, const Eigen::VectorXd& q, std::size_t index);

/// 3xn central differences of the oracle end-effector position.
Eigen::MatrixXd fd_position_jacobian(const teleop::KinematicChain& chain, const Eigen::VectorXd& q, double h);

/// Sum of m * (-g) . c over all links.
double potential_energy(const teleop::KinematicChain& chain, const Eigen::VectorXd& q);

/// Central differences of potential_energy.
Eigen::VectorXd fd_gravity_torque(const teleop::KinematicChain& chain, const Eigen::VectorXd& q, double h);

/// Kinetic energy 0.5 * sum m |dc/dt|^2, com velocities by central
/// differences along qd.
double kinetic_energy(const teleop::KinematicChain& chain, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                      double h);

/// Inertia matrix from the quadratic form T(qd) = 0.5 qd' M qd by
/// polarization over unit velocity pairs.
Eigen::MatrixXd energy_mass_matrix(const teleop::KinematicChain& chain, const Eigen::VectorXd& q, double h);

/// |X_k|^2 for k = 1..N/2 of the mean-removed signal, each bin summed
/// directly from cos/sin of 2 pi k n / N in long double.
std::vector<double> naive_power_spectrum(std::span<const double> signal);

/// Pearson correlation, two-pass in long double.
double pearson(std::span<const double> a, std::span<const double> b);

/// For |Z| with Z standard normal: P(|Z| > mu + 3 sigma) where mu, sigma are
/// the mean and standard deviation of |Z| (folded normal).
double folded_normal_three_sigma_tail();

/// Uniform configuration within the chain's joint limits.
Eigen::VectorXd random_config(const teleop::KinematicChain& chain, std::mt19937_64& rng);

}  // namespace oracle
