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
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "oracles/oracles.hpp"
#include "teleop/dynamics.hpp"

using namespace teleop;

namespace {

KinematicChain pendulum() {
  return parse_chain(R"([chain]
name = pendulum
[joint]
name = pitch
axis = 0 1 0
limits = -3 3
mass = 1
com = 0.5 0 0
)");
}

KinematicChain massless(KinematicChain c) {
  for (auto& j : c.joints) j.mass = 0.0;
  return c;
}

KinematicChain weightless(KinematicChain c) {
  c.gravity = Vec3::Zero();
  return c;
}

VecX uniform_vec(Eigen::Index n, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  VecX v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

}  // namespace

TEST_CASE("pendulum gravity torque") {
  const auto p = pendulum();
  const VecX horizontal = VecX::Zero(1);
  CHECK(std::abs(gravity_torque(p, horizontal)[0]) == doctest::Approx(4.905).epsilon(1e-12));
  CHECK(gravity_torque(p, horizontal)[0] == doctest::Approx(oracle::fd_gravity_torque(p, horizontal, 1e-6)[0]));
  const VecX vertical = VecX::Constant(1, -std::numbers::pi / 2);
  CHECK(std::abs(gravity_torque(p, vertical)[0]) < 1e-12);
}

TEST_CASE("gravity torque matches potential-energy differences") {
  std::mt19937_64 rng(31);
  for (const auto& c : {fixtures::leader3(), fixtures::follower7()}) {
    for (int i = 0; i < 100; ++i) {
      const VecX q = oracle::random_config(c, rng);
      const VecX g = gravity_torque(c, q);
      const VecX fd = oracle::fd_gravity_torque(c, q, 1e-5);
      REQUIRE((g - fd).norm() <= 1e-6 * std::max(1.0, fd.norm()));
    }
  }
  CHECK(gravity_torque(massless(fixtures::follower7()), VecX::Ones(7)).isZero());
}

TEST_CASE("friction compensation") {
  auto c = pendulum();
  c.joints[0].viscous_friction = 0.1;
  c.joints[0].coulomb_friction = 0.2;
  CHECK(friction_compensation(c, VecX::Zero(1))[0] == 0.0);
  CHECK(friction_compensation(c, VecX::Constant(1, 2.0))[0] == doctest::Approx(0.2 + 0.2 * std::tanh(200.0)));
  double prev = -1e9;
  for (double v = -3.0; v <= 3.0; v += 0.001) {
    const double f = friction_compensation(c, VecX::Constant(1, v))[0];
    REQUIRE(f >= prev);
    prev = f;
  }
}

TEST_CASE("inverse dynamics at rest is gravity torque") {
  std::mt19937_64 rng(32);
  for (const auto& c : {fixtures::leader3(), fixtures::follower7()}) {
    for (int i = 0; i < 100; ++i) {
      const VecX q = oracle::random_config(c, rng);
      const VecX z = VecX::Zero(q.size());
      REQUIRE((inverse_dynamics(c, q, z, z) - gravity_torque(c, q)).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("inverse dynamics without gravity is M qdd") {
  std::mt19937_64 rng(33);
  for (const auto& base : {fixtures::leader3(), fixtures::follower7()}) {
    const auto c = weightless(base);
    for (int i = 0; i < 50; ++i) {
      const VecX q = oracle::random_config(c, rng);
      const VecX qdd = uniform_vec(q.size(), -2, 2, rng);
      const MatX M = oracle::energy_mass_matrix(c, q, 1e-5);
      const VecX tau = inverse_dynamics(c, q, VecX::Zero(q.size()), qdd);
      REQUIRE((tau - M * qdd).cwiseAbs().maxCoeff() < 1e-8);
      REQUIRE((mass_matrix(c, q) - M).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
  const auto none = massless(fixtures::follower7());
  CHECK(inverse_dynamics(none, VecX::Ones(7), VecX::Ones(7), VecX::Ones(7)).isZero());
}

TEST_CASE("forward dynamics inverts inverse dynamics") {
  std::mt19937_64 rng(34);
  const auto c = fixtures::follower7();
  for (int i = 0; i < 20; ++i) {
    const VecX q = oracle::random_config(c, rng);
    const VecX qd = uniform_vec(7, -1, 1, rng);
    const VecX qdd = uniform_vec(7, -3, 3, rng);
    // Tip and base joints carry no inertia about their own axes, so the
    // armature keeps the system solvable.
    const VecX tau = inverse_dynamics(c, q, qd, qdd) + 0.05 * qdd;
    CHECK((forward_dynamics(c, q, qd, tau, 0.05, false) - qdd).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("pd torque") {
  Gains g{VecX::Constant(1, 10.0), VecX::Constant(1, 1.0)};
  CHECK(pd_torque(g, VecX::Zero(1), VecX::Zero(1))[0] == 0.0);
  CHECK(pd_torque(g, VecX::Constant(1, 0.1), VecX::Constant(1, 0.2))[0] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK_THROWS_AS(pd_torque(g, VecX::Zero(2), VecX::Zero(2)), std::invalid_argument);
  Gains bad{VecX::Constant(1, -1.0), VecX::Constant(1, 1.0)};
  CHECK_THROWS_AS(validate_gains(bad), std::invalid_argument);
}
