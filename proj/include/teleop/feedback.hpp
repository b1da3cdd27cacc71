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

// Sensorless virtual force feedback.
//
// The follower's end-effector tracking deviation
//
//   dee = ee_target - ee_current
//
// stands in for an external force. Its magnitude is regulated by the
// follower's Cartesian speed,
//
//   factor = sqrt(alpha * |dee|^2 / (1 + g(|v|)))
//
// where g is one of the velocity transforms below. The factor then displaces
// a virtual target for the leader arm (a spring between the two
// end-effectors) and scales the leader's impedance gains.

#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "teleop/dynamics.hpp"
#include "teleop/types.hpp"

namespace teleop {

enum class VelocityTransform { Abs, Squared, Exp, Tanh };

inline constexpr std::array<VelocityTransform, 4> kAllTransforms = {
    VelocityTransform::Abs, VelocityTransform::Squared, VelocityTransform::Exp, VelocityTransform::Tanh};

std::string_view to_string(VelocityTransform t);
std::optional<VelocityTransform> parse_transform(std::string_view name);

/// g(speed): abs -> v, squared -> v^2, exp -> e^v - 1, tanh -> tanh(v).
/// Every transform has g(0) = 0, so none of them changes feedback at rest.
double velocity_transform_value(VelocityTransform kind, double speed);

struct FeedbackParams {
  double alpha = 25.0;
  VelocityTransform transform = VelocityTransform::Squared;
  double deviation_clamp = 0.10;  // m
  double factor_clamp = 3.0;
  double spring_scale = 1.0;      // leader metres per follower metre
  double gain_gamma = 2.0;
  VecX kp_max;
  VecX kd_max;
};

void validate_feedback_params(const FeedbackParams& p);

/// Per-tick feedback quantities.
struct FeedbackState {
  Vec3 delta_ee = Vec3::Zero();
  Vec3 v_cartesian = Vec3::Zero();
  double factor = 0.0;
  Pose leader_virtual_target;
  Gains gains;
};

/// target - current, norm-clamped to `deviation_clamp` (direction kept).
Vec3 ee_deviation(const Vec3& target, const Vec3& current, double deviation_clamp);

double feedback_factor(const Vec3& delta_ee, const Vec3& v_cartesian, const FeedbackParams& params);

/// Leader set-point pulled toward the follower: leader_ee - s * delta_ee.
Pose virtual_target(const Pose& leader_ee, const Vec3& delta_ee, const FeedbackParams& params);

/// The deviation carried by the factor: direction of delta_ee, length
/// factor / sqrt(alpha). Equals delta_ee when the follower is at rest and the
/// factor is below its clamp; shrinks with speed like the factor does.
Vec3 regulated_deviation(const Vec3& delta_ee, double factor, const FeedbackParams& params);

/// kp' = min(kp * (1 + gamma * factor), kp_max), same for kd.
Gains modulate_gains(const Gains& base, double factor, const FeedbackParams& params);

}  // namespace teleop
