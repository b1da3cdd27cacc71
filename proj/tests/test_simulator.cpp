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


#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "teleop/feedback.hpp"
#include "teleop/simulator.hpp"

using namespace teleop;

namespace {

constexpr double kDt = 1.0 / 200.0;

VecX follower_home() {
  VecX q(7);
  q << 0, 0.6, 0, 1.6, 0, 0.94, 0;
  return q;
}

VecX leader_home() {
  VecX q(3);
  q << 0, -0.8, 1.4;
  return q;
}

Gains leader_gains() { return Gains{Eigen::Vector3d(2, 2, 1), Eigen::Vector3d(0.05, 0.05, 0.03)}; }

VecX reach(const KinematicChain& c, const Vec3& p, const VecX& seed) {
  Pose target;
  target.position = p;
  IkParams params;
  params.max_iterations = 200;
  params.position_tol = 1e-9;
  const auto r = solve_ik(c, target, seed, IkTaskWeights{1, 0, 0, 0}, params);
  REQUIRE(r.report.converged);
  return r.q;
}

}  // namespace

TEST_CASE("contact force") {
  World w;
  w.half_spaces.push_back(HalfSpace{"wall", Vec3(-1, 0, 0), -0.4, 5000, 50, true});
  CHECK_FALSE(contact_force(w, Vec3(0.39, 0, 0), Vec3::Zero()).in_contact);
  const auto c = contact_force(w, Vec3(0.41, 0, 0), Vec3::Zero());
  CHECK(c.in_contact);
  CHECK((c.force - Vec3(-50, 0, 0)).norm() < 1e-9);
  // Receding fast enough: in contact, but the penalty never pulls.
  const auto pull = contact_force(w, Vec3(0.401, 0, 0), Vec3(-1, 0, 0));
  CHECK(pull.in_contact);
  CHECK(pull.force.isZero());
  World bad;
  bad.half_spaces.push_back(HalfSpace{"x", Vec3(0, 0, 2), 0, -1, 0, true});
  CHECK(validate_world(bad).size() == 2);
}

TEST_CASE("follower at its target stays put") {
  const auto c = fixtures::follower7();
  auto s = make_follower_state(c, follower_home(), kDt);
  const auto next = step_follower(c, s, follower_home(), VecX(), World{}, FollowerControl{}, kDt);
  CHECK(next.joint_state.q == s.joint_state.q);
  CHECK(next.joint_state.qd.isZero());
  CHECK(next.joint_state.tick == 1);
}

TEST_CASE("follower reaches a free-space target within half a second") {
  const auto c = fixtures::follower7();
  const VecX q0 = follower_home();
  const Vec3 p0 = forward_kinematics(c, q0).position;
  const VecX target = reach(c, p0 + Vec3(0.05, 0.08, -0.05), q0);
  const Vec3 goal = forward_kinematics(c, target).position;
  auto s = make_follower_state(c, q0, kDt);
  for (int i = 0; i < 100; ++i) s = step_follower(c, s, target, VecX(), World{}, FollowerControl{}, kDt);
  CHECK((s.ee_pose.position - goal).norm() < 1e-3);
}

TEST_CASE("follower pressed into a wall settles in penalty equilibrium") {
  const auto c = fixtures::follower7();
  World w;
  w.half_spaces.push_back(HalfSpace{"wall", Vec3(-1, 0, 0), -0.4, 5000, 50, false});
  const Vec3 home = forward_kinematics(c, follower_home()).position;
  const VecX q0 = reach(c, Vec3(0.35, home.y(), home.z()), follower_home());
  const Vec3 p0 = forward_kinematics(c, q0).position;
  const VecX target = reach(c, Vec3(0.45, p0.y(), p0.z()), q0);
  const Vec3 goal = forward_kinematics(c, target).position;
  auto s = make_follower_state(c, q0, kDt);
  for (int i = 0; i < 600; ++i) s = step_follower(c, s, target, VecX(), w, FollowerControl{}, kDt);
  const Vec3 dee = goal - s.ee_pose.position;
  CHECK(dee.x() > 0.0);
  CHECK(dee.x() <= 0.05);
  CHECK(s.contact.in_contact);
  CHECK(s.contact.force.x() < 0.0);
  CHECK(s.joint_state.qd.norm() < 1e-3);
}

TEST_CASE("follower speed decays monotonically when commanded to hold") {
  const auto c = fixtures::follower7();
  auto s = make_follower_state(c, follower_home(), kDt);
  s.joint_state.qd = VecX::Constant(7, 0.5);
  double prev = INFINITY;
  for (int i = 0; i < 400; ++i) {
    s = step_follower(c, s, follower_home(), VecX(), World{}, FollowerControl{}, kDt);
    const double speed = s.joint_state.qd.norm();
    if (i >= 100) {
      REQUIRE(speed <= prev);
    }
    prev = speed;
  }
  CHECK(prev < 1e-6);
}

TEST_CASE("follower saturates instead of failing") {
  const auto c = fixtures::follower7();
  auto s = make_follower_state(c, VecX::Zero(7), kDt);
  const VecX far = VecX::Constant(7, 10.0);
  for (int i = 0; i < 200; ++i) {
    s = step_follower(c, s, far, VecX(), World{}, FollowerControl{}, kDt);
    REQUIRE(c.within_limits(s.joint_state.q));
    for (std::size_t j = 0; j < 7; ++j) {
      REQUIRE(std::abs(s.joint_state.qd[static_cast<Eigen::Index>(j)]) <= c.joints[j].max_velocity);
    }
  }
}

TEST_CASE("held leader without deviation renders no force") {
  const auto c = fixtures::leader3();
  JointState st{leader_home(), VecX::Zero(3), 0, kDt};
  const Pose ee = forward_kinematics(c, st.q);
  const HandInput hand{ee.position, Vec3::Zero()};
  LeaderStep step;
  for (int i = 0; i < 400; ++i) {
    step = step_leader(c, st, OperatorModel{}, hand, ee, leader_gains(), LeaderModel{});
    st = step.state;
  }
  CHECK(step.rendered_force.norm() < 0.05);
}

TEST_CASE("leader displacement under maximum feedback stays below 2 cm") {
  const auto c = fixtures::leader3();
  FeedbackParams fp;
  fp.spring_scale = 1.0 / 1.5;
  fp.kp_max = Eigen::Vector3d(5, 5, 2.5);
  fp.kd_max = Eigen::Vector3d(0.12, 0.12, 0.08);
  const Gains g = modulate_gains(leader_gains(), fp.factor_clamp, fp);
  JointState st{leader_home(), VecX::Zero(3), 0, kDt};
  const Pose ee = forward_kinematics(c, st.q);
  const HandInput hand{ee.position, Vec3::Zero()};
  for (const Vec3& dir : {Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1), Vec3(0, 0, -1)}) {
    // The largest deviation the loop can carry is the clamped one at rest.
    const Vec3 dee = dir * fp.deviation_clamp;
    const double factor = feedback_factor(dee, Vec3::Zero(), fp);
    const Pose vt = virtual_target(ee, regulated_deviation(dee, factor, fp), fp);
    JointState s = st;
    LeaderStep step;
    for (int i = 0; i < 600; ++i) {
      step = step_leader(c, s, OperatorModel{}, hand, vt, g, LeaderModel{});
      s = step.state;
    }
    CHECK((step.ee_pose.position - ee.position).norm() < 0.02);
    CHECK(step.rendered_force.norm() > 0.0);
  }
}
