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

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace teleop {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Unit quaternion. Text and wire formats store it scalar-last (x, y, z, w),
/// which matches Eigen's coeffs() layout.
using Quat = Eigen::Quaterniond;

/// End-effector pose in a base frame.
struct Pose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();
};

/// True when a and b describe the same rotation (q and -q are equal).
inline bool same_orientation(const Quat& a, const Quat& b, double tol = 1e-9) {
  return std::abs(std::abs(a.dot(b)) - 1.0) <= tol;
}

}  // namespace teleop
