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

// WebSocket bridge between the teleop loop and an operator console.
//
// Inbound: binary OperatorPose frames (protocol module encoding). The loop
// takes the newest pose each tick; older unread poses are dropped.
// Outbound: JSON text messages. The first is
//
//   {"type":"hello", "scenario":..., "tick_rate":..., "stream_hz":...,
//    "leader_dof":..., "follower_dof":..., "obstacles":[visible only]}
//
// followed by {"type":"record","record":{...}} at the stream rate, with the
// ground-truth contact force left out. When the client falls behind, the
// oldest queued records are dropped; the loop never waits on the network.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "teleop/scenario.hpp"
#include "teleop/teleop_loop.hpp"

namespace teleop {

enum class BridgePacing {
  Realtime,  // one tick per scenario dt of wall-clock time
  Lockstep,  // one tick per received pose, none dropped (input replay)
};

struct BridgeOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks a free port
  double stream_hz = 50.0;  // at least 30
  std::size_t outbound_capacity = 64;
  BridgePacing pacing = BridgePacing::Realtime;
  std::optional<std::int64_t> max_ticks;  // stop after this many ticks
};

struct BridgeStats {
  std::uint64_t poses_received = 0;
  std::uint64_t records_queued = 0;
  std::uint64_t records_dropped = 0;
  std::uint64_t clients_accepted = 0;
};

/// Hello message payload (exposed for auditing what a client can see).
std::string bridge_hello(const Scenario& scenario, double stream_hz);

/// Ticks between streamed records: the largest decimation that keeps the
/// stream at or above `stream_hz`.
int stream_decimation(int tick_rate, double stream_hz);

class Bridge {
 public:
  /// Binds the listening socket; throws std::system_error when the address
  /// is unavailable and std::invalid_argument for bad options.
  Bridge(const Scenario& scenario, const BridgeOptions& options);
  ~Bridge();
  Bridge(const Bridge&) = delete;
  Bridge& operator=(const Bridge&) = delete;

  std::uint16_t port() const;

  /// Runs the control loop on the calling thread until max_ticks or stop().
  void run();

  /// Safe to call from any thread.
  void stop();

  /// Records of every tick run so far.
  std::vector<TraceRecord> trace() const;
  BridgeStats stats() const;

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace teleop
