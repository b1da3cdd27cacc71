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

// Leader <-> follower wire format. Byte layout is documented in
// docs/frame_layout.md; every multi-byte field is little-endian and doubles
// are IEEE-754 binary64 copied bit for bit.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace teleop::protocol {

inline constexpr std::uint16_t kProtocolVersion = 1;

enum class FrameType : std::uint8_t {
  Handshake = 0x01,
  LeaderCommand = 0x02,
  FollowerState = 0x03,
  OperatorPose = 0x04,
};

struct Handshake {
  std::uint16_t protocol_version = kProtocolVersion;
  std::string chain_name;
  std::uint16_t joint_count = 0;
  std::uint16_t tick_rate_hz = 200;
};

struct LeaderCommand {
  std::uint32_t seq = 0;
  std::uint64_t timestamp_us = 0;
  std::vector<double> q_target;
  double gripper = 0.0;
};

struct FollowerState {
  std::uint32_t seq = 0;  // last applied command
  std::uint64_t timestamp_us = 0;
  std::vector<double> q_current;
  std::vector<double> qd_current;
  std::array<double, 3> contact_force_truth{};
};

/// Operator hand pose streamed by the UI bridge: leader-frame position and
/// orientation source (x, y, z, w).
struct OperatorPose {
  std::uint32_t seq = 0;
  std::uint64_t timestamp_us = 0;
  std::array<double, 3> position{};
  std::array<double, 4> orientation{0.0, 0.0, 0.0, 1.0};
};

using Message = std::variant<Handshake, LeaderCommand, FollowerState, OperatorPose>;
using Frame = std::vector<std::uint8_t>;

enum class DecodeErrorKind {
  Truncated,
  UnknownTag,
  LengthMismatch,
  TrailingBytes,
  InvalidField,
};

std::string_view to_string(DecodeErrorKind k);

struct DecodeError {
  DecodeErrorKind kind;
  std::size_t offset = 0;  // byte offset where decoding stopped
  std::string detail;
};

/// Either a message or a structured error; decoding never throws.
class DecodeResult {
 public:
  DecodeResult(Message m) : v_(std::move(m)) {}
  DecodeResult(DecodeError e) : v_(std::move(e)) {}

  bool ok() const { return std::holds_alternative<Message>(v_); }
  explicit operator bool() const { return ok(); }
  const Message& message() const { return std::get<Message>(v_); }
  const DecodeError& error() const { return std::get<DecodeError>(v_); }

 private:
  std::variant<Message, DecodeError> v_;
};

Frame encode(const Message& message);

/// Decodes one whole frame. When `expected_joint_count` is set (after the
/// handshake), joint vectors of any other length are rejected.
DecodeResult decode(std::span<const std::uint8_t> bytes,
                    std::optional<std::uint16_t> expected_joint_count = std::nullopt);

/// Field-wise equality with doubles compared by bit pattern.
bool bit_equal(const Message& a, const Message& b);

/// Latest-wins acceptance of sequenced frames: stale or repeated sequence
/// numbers are discarded so the applied sequence is monotone.
class SequenceGate {
 public:
  bool accept(std::uint32_t seq);
  std::optional<std::uint32_t> last() const { return last_; }

 private:
  std::optional<std::uint32_t> last_;
};

enum class StaleAction { Hold, SoftStop };

inline constexpr int kDefaultStaleTimeoutTicks = 50;

/// Hold the last command while it is at most `timeout_ticks` old, then
/// soft-stop (ramp joint velocity to zero).
StaleAction stale_command_policy(const LeaderCommand& last_applied, std::int64_t age_ticks,
                                 std::int64_t timeout_ticks = kDefaultStaleTimeoutTicks);

}  // namespace teleop::protocol
