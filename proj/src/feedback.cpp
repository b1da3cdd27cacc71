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

#include "teleop/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace teleop {

std::string_view to_string(VelocityTransform t) {
  switch (t) {
    case VelocityTransform::Abs: return "abs";
    case VelocityTransform::Squared: return "squared";
    case VelocityTransform::Exp: return "exp";
    case VelocityTransform::Tanh: return "tanh";
  }
  return "unknown";
}

std::optional<VelocityTransform> parse_transform(std::string_view name) {
  for (auto t : kAllTransforms) {
    if (to_string(t) == name) return t;
  }
  return std::nullopt;
}

double velocity_transform_value(VelocityTransform kind, double speed) {
  switch (kind) {
    case VelocityTransform::Abs: return std::abs(speed);
    case VelocityTransform::Squared: return speed * speed;
    case VelocityTransform::Exp: return std::expm1(speed);
    case VelocityTransform::Tanh: return std::tanh(speed);
  }
  return 0.0;
}

void validate_feedback_params(const FeedbackParams& p) {
  if (!(p.alpha > 0.0)) throw std::invalid_argument("feedback: alpha must be > 0");
  if (!(p.deviation_clamp > 0.0) || !(p.factor_clamp > 0.0)) {
    throw std::invalid_argument("feedback: clamps must be > 0");
  }
  if (!(p.spring_scale >= 0.0) || !(p.gain_gamma >= 0.0)) {
    throw std::invalid_argument("feedback: spring_scale and gain_gamma must be >= 0");
  }
  if ((p.kp_max.array() <= 0.0).any() || (p.kd_max.array() <= 0.0).any()) {
    throw std::invalid_argument("feedback: gain clamps must be > 0");
  }
}

Vec3 ee_deviation(const Vec3& target, const Vec3& current, double deviation_clamp) {
  Vec3 d = target - current;
  const double n = d.norm();
  if (n > deviation_clamp) d *= deviation_clamp / n;
  return d;
}

double feedback_factor(const Vec3& delta_ee, const Vec3& v_cartesian, const FeedbackParams& params) {
  const double g = velocity_transform_value(params.transform, v_cartesian.norm());
  const double f = std::sqrt(params.alpha * delta_ee.squaredNorm() / (1.0 + g));
  return std::min(f, params.factor_clamp);
}

Pose virtual_target(const Pose& leader_ee, const Vec3& delta_ee, const FeedbackParams& params) {
  Pose out = leader_ee;
  out.position = leader_ee.position - params.spring_scale * delta_ee;
  return out;
}

Vec3 regulated_deviation(const Vec3& delta_ee, double factor, const FeedbackParams& params) {
  const double n = delta_ee.norm();
  if (n == 0.0) return Vec3::Zero();
  return delta_ee * (factor / (std::sqrt(params.alpha) * n));
}

Gains modulate_gains(const Gains& base, double factor, const FeedbackParams& params) {
  const double scale = 1.0 + params.gain_gamma * factor;
  Gains out{base.kp * scale, base.kd * scale};
  if (params.kp_max.size() == out.kp.size()) out.kp = out.kp.cwiseMin(params.kp_max);
  if (params.kd_max.size() == out.kd.size()) out.kd = out.kd.cwiseMin(params.kd_max);
  return out;
}

}  // namespace teleop
