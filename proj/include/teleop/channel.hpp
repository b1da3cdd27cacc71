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

#include <cstdint>
#include <deque>
#include <random>
#include <vector>

#include "teleop/protocol.hpp"

namespace teleop {

struct ChannelModel {
  double drop_probability = 0.0;
  int latency_ticks = 0;
  int jitter_ticks = 0;
  std::uint64_t rng_seed = 0;
};

void validate_channel_model(const ChannelModel& m);

/// One direction of a lossy, latent datagram link, advanced in control
/// ticks. Each frame is dropped independently with `drop_probability`,
/// otherwise delivered `latency_ticks + U{0..jitter_ticks}` ticks after it
/// was sent. Delivered frames never overtake earlier frames from the same
/// sender. Fully determined by the seed.
class Channel {
 public:
  explicit Channel(const ChannelModel& model);

  /// Sends `inbox` at the current tick, returns every frame due at this tick
  /// (including zero-latency frames just sent), then advances one tick.
  std::vector<protocol::Frame> step(std::vector<protocol::Frame> inbox);

  std::int64_t tick() const { return tick_; }
  std::size_t in_flight() const { return queue_.size(); }

 private:
  double uniform();

  struct InFlight {
    std::int64_t due;
    protocol::Frame frame;
  };

  ChannelModel model_;
  std::mt19937_64 rng_;
  std::deque<InFlight> queue_;
  std::int64_t tick_ = 0;
  std::int64_t last_due_ = 0;
};

/// SplitMix64 step, used to derive independent stream seeds from one
/// scenario seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace teleop
