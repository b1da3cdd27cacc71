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

#include "teleop/teleop_loop.hpp"

#include "teleop/config_text.hpp"

namespace teleop {

namespace {

constexpr int kInitialIkIterations = 1000;
// Velocity feedforward keeps being applied across this many missed commands.
constexpr std::int64_t kFeedforwardHoldTicks = 5;

bool same(const VecX& a, const VecX& b) { return a.size() == b.size() && a == b; }
bool same(const Pose& a, const Pose& b) {
  return a.position == b.position && a.orientation.coeffs() == b.orientation.coeffs();
}

VecX to_vec(const std::vector<double>& v) { return Eigen::Map<const VecX>(v.data(), static_cast<Eigen::Index>(v.size())); }
std::vector<double> to_std(const VecX& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

bool operator==(const TraceRecord& a, const TraceRecord& b) {
  return a.tick == b.tick && a.time == b.time && a.operator_present == b.operator_present &&
         a.hand_position == b.hand_position && same(a.leader_ee, b.leader_ee) &&
         same(a.follower_target, b.follower_target) && same(a.follower_actual, b.follower_actual) &&
         a.delta_ee == b.delta_ee && a.v_cartesian == b.v_cartesian && a.factor == b.factor &&
         a.virtual_target == b.virtual_target && same(a.kp, b.kp) && same(a.kd, b.kd) &&
         a.contact_force_truth == b.contact_force_truth && a.in_contact == b.in_contact &&
         a.rendered_force == b.rendered_force && same(a.leader_q, b.leader_q) && same(a.follower_q, b.follower_q) &&
         a.applied_seq == b.applied_seq && a.ik_converged == b.ik_converged;
}

OperatorSample scripted_sample(const Scenario& s, double t) {
  return OperatorSample{s.path.position(t), s.path.velocity(t), s.orientation_source};
}

TeleopSession::TeleopSession(const Scenario& scenario)
    : scenario_(scenario), to_follower_(command_channel(scenario)), to_leader_(state_channel(scenario)) {
  auto issues = validate_scenario(scenario_);
  if (!issues.empty()) throw ConfigError(std::move(issues));
  const double dt = scenario_.dt();

  IkParams leader_ik = scenario_.leader_model.ik;
  leader_ik.max_iterations = kInitialIkIterations;
  const IkResult leader0 = solve_ik(scenario_.leader, Pose{scenario_.path.position(0.0), Quat::Identity()},
                                    scenario_.leader_home, IkTaskWeights{1.0, 0.0, 0.0, 0.0}, leader_ik);
  leader_.q = leader0.q;
  leader_.qd = VecX::Zero(leader0.q.size());
  leader_.dt = dt;

  const Pose leader_ee = forward_kinematics(scenario_.leader, leader_.q);
  initial_target_ = retarget(leader_ee, scenario_.orientation_source, scenario_.retarget);
  last_target_ = initial_target_;
  IkParams follower_ik = scenario_.follower_ik;
  follower_ik.max_iterations = kInitialIkIterations;
  const IkResult follower0 = solve_ik(scenario_.follower, initial_target_, scenario_.follower_home,
                                      scenario_.follower_weights, follower_ik);
  follower_ik_q_ = follower0.q;
  last_ik_converged_ = follower0.report.converged;
  follower_ = make_follower_state(scenario_.follower, follower0.q, dt);
  hold_target_ = follower0.q;
  feedforward_ = VecX::Zero(follower0.q.size());

  protocol::FollowerState s0;
  s0.q_current = to_std(follower0.q);
  s0.qd_current.assign(s0.q_current.size(), 0.0);
  latest_state_ = s0;
}

void TeleopSession::release_operator() { operator_released_ = true; }

const Pose& TeleopSession::target_for_seq(std::uint32_t seq) const {
  for (auto it = sent_targets_.rbegin(); it != sent_targets_.rend(); ++it) {
    if (it->first == seq) return it->second;
  }
  return seq == 0 ? initial_target_ : last_target_;
}

void TeleopSession::follower_side(std::vector<protocol::Frame> delivered) {
  const auto& chain = scenario_.follower;
  const auto n = static_cast<Eigen::Index>(chain.dof());
  const double dt = scenario_.dt();
  for (const auto& frame : delivered) {
    const auto r = protocol::decode(frame, static_cast<std::uint16_t>(chain.dof()));
    if (!r.ok()) continue;
    const auto* cmd = std::get_if<protocol::LeaderCommand>(&r.message());
    if (cmd == nullptr || !gate_.accept(cmd->seq)) continue;
    const VecX q_new = to_vec(cmd->q_target);
    if (applied_ && !soft_stopped_) {
      feedforward_ = (q_new - to_vec(applied_->q_target)) / ((cmd->seq - applied_->seq) * dt);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double vmax = chain.joints[static_cast<std::size_t>(i)].max_velocity;
        feedforward_[i] = std::clamp(feedforward_[i], -vmax, vmax);
      }
    } else {
      feedforward_.setZero();
    }
    applied_ = *cmd;
    applied_tick_ = tick_;
    soft_stopped_ = false;
  }

  VecX target = hold_target_;
  VecX ff = VecX::Zero(n);
  if (applied_ && !soft_stopped_) {
    const std::int64_t age = tick_ - applied_tick_;
    const auto action = protocol::stale_command_policy(*applied_, age, scenario_.stale_timeout_ticks);
    if (action == protocol::StaleAction::Hold) {
      target = to_vec(applied_->q_target);
      if (age <= kFeedforwardHoldTicks) ff = scenario_.follower_control.feedforward_gain * feedforward_;
    } else {
      soft_stopped_ = true;
      hold_target_ = follower_.joint_state.q;
      target = hold_target_;
    }
  }
  follower_ = step_follower(chain, follower_, target, ff, scenario_.world, scenario_.follower_control, dt);
}

TraceRecord TeleopSession::step(const std::optional<OperatorSample>& sample) {
  const double dt = scenario_.dt();
  const auto rate = static_cast<std::uint64_t>(scenario_.tick_rate);
  const auto timestamp = static_cast<std::uint64_t>(tick_) * 1000000u / rate;

  if (sample) {
    last_sample_ = sample;
    operator_age_ = 0;
    operator_released_ = false;
  } else if (last_sample_) {
    ++operator_age_;
  }
  const bool present = last_sample_ && !operator_released_ && operator_age_ <= scenario_.stale_timeout_ticks;

  // Leader endpoint: retarget the current leader pose and command the follower.
  const Pose leader_ee = forward_kinematics(scenario_.leader, leader_.q);
  std::vector<protocol::Frame> outbound;
  if (present) {
    const Pose target = retarget(leader_ee, last_sample_->orientation, scenario_.retarget);
    const IkResult ik =
        solve_ik(scenario_.follower, target, follower_ik_q_, scenario_.follower_weights, scenario_.follower_ik);
    follower_ik_q_ = ik.q;
    last_ik_converged_ = ik.report.converged;
    protocol::LeaderCommand cmd;
    cmd.seq = next_seq_++;
    cmd.timestamp_us = timestamp;
    cmd.q_target = to_std(ik.q);
    cmd.gripper = scenario_.gripper;
    sent_targets_.emplace_back(cmd.seq, target);
    last_target_ = target;
    outbound.push_back(protocol::encode(cmd));
  }

  // Follower endpoint.
  follower_side(to_follower_.step(std::move(outbound)));
  protocol::FollowerState state;
  state.seq = applied_ ? applied_->seq : 0;
  state.timestamp_us = timestamp;
  state.q_current = to_std(follower_.joint_state.q);
  state.qd_current = to_std(follower_.joint_state.qd);
  for (int i = 0; i < 3; ++i) state.contact_force_truth[static_cast<std::size_t>(i)] = follower_.contact.force[i];

  // Leader endpoint: feedback from the freshest follower state.
  for (const auto& frame : to_leader_.step({protocol::encode(state)})) {
    const auto r = protocol::decode(frame, static_cast<std::uint16_t>(scenario_.follower.dof()));
    if (!r.ok()) continue;
    const auto* fs = std::get_if<protocol::FollowerState>(&r.message());
    if (fs != nullptr && fs->timestamp_us >= latest_state_->timestamp_us) latest_state_ = *fs;
  }
  while (sent_targets_.size() > 1 && sent_targets_.front().first < latest_state_->seq) sent_targets_.pop_front();

  const auto& fp = scenario_.feedback;
  const VecX fq = to_vec(latest_state_->q_current);
  const VecX fqd = to_vec(latest_state_->qd_current);
  const ChainFrames frames = compute_frames(scenario_.follower, fq);
  FeedbackState fb;
  fb.delta_ee = ee_deviation(target_for_seq(latest_state_->seq).position, frames.ee.position, fp.deviation_clamp);
  fb.v_cartesian = jacobian(frames).topRows<3>() * fqd;
  fb.factor = feedback_factor(fb.delta_ee, fb.v_cartesian, fp);
  const Vec3 carried = regulated_deviation(fb.delta_ee, fb.factor, fp);
  fb.leader_virtual_target = virtual_target(leader_ee, scenario_.retarget.rotation.inverse() * carried, fp);
  fb.gains = modulate_gains(scenario_.leader_gains, fb.factor, fp);

  std::optional<HandInput> hand;
  if (present) hand = HandInput{last_sample_->position, sample ? sample->velocity : Vec3::Zero()};
  const LeaderStep ls = step_leader(scenario_.leader, leader_, scenario_.operator_model, hand,
                                    fb.leader_virtual_target, fb.gains, scenario_.leader_model);
  leader_ = ls.state;

  TraceRecord rec;
  rec.tick = tick_;
  rec.time = static_cast<double>(tick_) * dt;
  rec.operator_present = present;
  rec.hand_position = last_sample_ ? last_sample_->position : leader_ee.position;
  rec.leader_ee = ls.ee_pose;
  rec.follower_target = last_target_;
  rec.follower_actual = follower_.ee_pose;
  rec.delta_ee = fb.delta_ee;
  rec.v_cartesian = fb.v_cartesian;
  rec.factor = fb.factor;
  rec.virtual_target = fb.leader_virtual_target.position;
  rec.kp = fb.gains.kp;
  rec.kd = fb.gains.kd;
  rec.contact_force_truth = follower_.contact.force;
  rec.in_contact = follower_.contact.in_contact;
  rec.rendered_force = ls.rendered_force;
  rec.leader_q = leader_.q;
  rec.follower_q = follower_.joint_state.q;
  rec.applied_seq = state.seq;
  rec.ik_converged = last_ik_converged_;
  ++tick_;
  return rec;
}

std::vector<TraceRecord> run_teleop_loop(const Scenario& scenario) {
  TeleopSession session(scenario);
  std::vector<TraceRecord> trace;
  const std::int64_t n = scenario.ticks();
  trace.reserve(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < n; ++k) {
    trace.push_back(session.step(scripted_sample(scenario, static_cast<double>(k) * scenario.dt())));
  }
  return trace;
}

}  // namespace teleop
