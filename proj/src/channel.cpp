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

#include "teleop/channel.hpp"

#include <algorithm>
#include <stdexcept>

namespace teleop {

void validate_channel_model(const ChannelModel& m) {
  if (!(m.drop_probability >= 0.0 && m.drop_probability <= 1.0)) {
    throw std::invalid_argument("channel: drop_probability must be in [0, 1]");
  }
  if (m.latency_ticks < 0 || m.jitter_ticks < 0) throw std::invalid_argument("channel: ticks must be >= 0");
}

Channel::Channel(const ChannelModel& model) : model_(model), rng_(model.rng_seed) { validate_channel_model(model); }

double Channel::uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

std::vector<protocol::Frame> Channel::step(std::vector<protocol::Frame> inbox) {
  for (auto& frame : inbox) {
    // Both draws happen for every frame so the schedule of later frames does
    // not depend on whether this one was dropped.
    const double u = uniform();
    const std::uint64_t jitter_draw = rng_();
    if (u < model_.drop_probability) continue;
    const auto jitter = model_.jitter_ticks > 0
                            ? static_cast<std::int64_t>(jitter_draw % static_cast<std::uint64_t>(model_.jitter_ticks + 1))
                            : 0;
    const std::int64_t due = std::max(tick_ + model_.latency_ticks + jitter, last_due_);
    last_due_ = due;
    queue_.push_back(InFlight{due, std::move(frame)});
  }
  std::vector<protocol::Frame> delivered;
  while (!queue_.empty() && queue_.front().due <= tick_) {
    delivered.push_back(std::move(queue_.front().frame));
    queue_.pop_front();
  }
  ++tick_;
  return delivered;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace teleop
