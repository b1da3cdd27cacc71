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

#include "teleop/protocol.hpp"

#include <bit>
#include <cstring>
#include <type_traits>

namespace teleop::protocol {

namespace {

class Writer {
 public:
  explicit Writer(std::size_t reserve) { out_.reserve(reserve); }

  template <typename T>
  void put(T v) {
    static_assert(std::is_integral_v<T>);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<std::uint8_t>(static_cast<std::make_unsigned_t<T>>(v) >> (8 * i)));
    }
  }
  void put_f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
  void put_bytes(const std::string& s) { out_.insert(out_.end(), s.begin(), s.end()); }

  Frame take() { return std::move(out_); }

 private:
  Frame out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return b_.size() - pos_; }

  template <typename T>
  bool get(T& v) {
    if (remaining() < sizeof(T)) return false;
    std::make_unsigned_t<T> acc = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      acc |= static_cast<std::make_unsigned_t<T>>(static_cast<std::make_unsigned_t<T>>(b_[pos_ + i]) << (8 * i));
    }
    v = static_cast<T>(acc);
    pos_ += sizeof(T);
    return true;
  }
  bool get_f64(double& v) {
    std::uint64_t bits = 0;
    if (!get(bits)) return false;
    v = std::bit_cast<double>(bits);
    return true;
  }
  bool get_string(std::size_t n, std::string& s) {
    if (remaining() < n) return false;
    s.assign(reinterpret_cast<const char*>(b_.data() + pos_), n);
    pos_ += n;
    return true;
  }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

DecodeError make_error(DecodeErrorKind k, std::size_t offset, std::string detail) {
  return DecodeError{k, offset, std::move(detail)};
}

DecodeError truncated(const Reader& r, const char* field) {
  return make_error(DecodeErrorKind::Truncated, r.offset(), std::string("frame ends inside ") + field);
}

std::optional<DecodeError> check_count(const Reader& r, std::uint16_t count,
                                       std::optional<std::uint16_t> expected) {
  if (expected && count != *expected) {
    return make_error(DecodeErrorKind::LengthMismatch, r.offset(),
                      "joint count " + std::to_string(count) + " does not match handshake " +
                          std::to_string(*expected));
  }
  return std::nullopt;
}

std::optional<DecodeError> check_tail(const Reader& r) {
  if (r.remaining() != 0) {
    return make_error(DecodeErrorKind::TrailingBytes, r.offset(),
                      std::to_string(r.remaining()) + " unexpected trailing byte(s)");
  }
  return std::nullopt;
}

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

template <typename C>
bool same_bits(const C& a, const C& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_bits(a[i], b[i])) return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(DecodeErrorKind k) {
  switch (k) {
    case DecodeErrorKind::Truncated: return "truncated frame";
    case DecodeErrorKind::UnknownTag: return "unknown type tag";
    case DecodeErrorKind::LengthMismatch: return "length mismatch";
    case DecodeErrorKind::TrailingBytes: return "trailing bytes";
    case DecodeErrorKind::InvalidField: return "invalid field";
  }
  return "unknown error";
}

Frame encode(const Message& message) {
  return std::visit(
      [](const auto& m) -> Frame {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Handshake>) {
          Writer w(9 + m.chain_name.size());
          w.put(static_cast<std::uint8_t>(FrameType::Handshake));
          w.put(m.protocol_version);
          w.put(m.joint_count);
          w.put(m.tick_rate_hz);
          w.put(static_cast<std::uint16_t>(m.chain_name.size()));
          w.put_bytes(m.chain_name);
          return w.take();
        } else if constexpr (std::is_same_v<T, LeaderCommand>) {
          Writer w(23 + 8 * m.q_target.size());
          w.put(static_cast<std::uint8_t>(FrameType::LeaderCommand));
          w.put(m.seq);
          w.put(m.timestamp_us);
          w.put(static_cast<std::uint16_t>(m.q_target.size()));
          w.put_f64(m.gripper);
          for (double v : m.q_target) w.put_f64(v);
          return w.take();
        } else if constexpr (std::is_same_v<T, FollowerState>) {
          Writer w(39 + 16 * m.q_current.size());
          w.put(static_cast<std::uint8_t>(FrameType::FollowerState));
          w.put(m.seq);
          w.put(m.timestamp_us);
          w.put(static_cast<std::uint16_t>(m.q_current.size()));
          for (double v : m.contact_force_truth) w.put_f64(v);
          for (double v : m.q_current) w.put_f64(v);
          for (double v : m.qd_current) w.put_f64(v);
          return w.take();
        } else {
          Writer w(69);
          w.put(static_cast<std::uint8_t>(FrameType::OperatorPose));
          w.put(m.seq);
          w.put(m.timestamp_us);
          for (double v : m.position) w.put_f64(v);
          for (double v : m.orientation) w.put_f64(v);
          return w.take();
        }
      },
      message);
}

DecodeResult decode(std::span<const std::uint8_t> bytes, std::optional<std::uint16_t> expected_joint_count) {
  Reader r(bytes);
  std::uint8_t tag = 0;
  if (!r.get(tag)) return truncated(r, "type tag");

  switch (static_cast<FrameType>(tag)) {
    case FrameType::Handshake: {
      Handshake h;
      std::uint16_t name_len = 0;
      if (!r.get(h.protocol_version)) return truncated(r, "protocol_version");
      if (!r.get(h.joint_count)) return truncated(r, "joint_count");
      if (!r.get(h.tick_rate_hz)) return truncated(r, "tick_rate_hz");
      if (!r.get(name_len)) return truncated(r, "chain name length");
      if (!r.get_string(name_len, h.chain_name)) return truncated(r, "chain name");
      if (auto e = check_tail(r)) return *e;
      if (h.joint_count == 0) return make_error(DecodeErrorKind::InvalidField, 3, "joint_count must be >= 1");
      return Message{std::move(h)};
    }
    case FrameType::LeaderCommand: {
      LeaderCommand c;
      std::uint16_t count = 0;
      if (!r.get(c.seq)) return truncated(r, "seq");
      if (!r.get(c.timestamp_us)) return truncated(r, "timestamp");
      if (!r.get(count)) return truncated(r, "joint count");
      if (auto e = check_count(r, count, expected_joint_count)) return *e;
      if (!r.get_f64(c.gripper)) return truncated(r, "gripper");
      if (r.remaining() < 8u * count) return truncated(r, "q_target");
      c.q_target.resize(count);
      for (auto& v : c.q_target) r.get_f64(v);
      if (auto e = check_tail(r)) return *e;
      if (!(c.gripper >= 0.0 && c.gripper <= 1.0)) {
        return make_error(DecodeErrorKind::InvalidField, 15, "gripper outside [0, 1]");
      }
      return Message{std::move(c)};
    }
    case FrameType::FollowerState: {
      FollowerState s;
      std::uint16_t count = 0;
      if (!r.get(s.seq)) return truncated(r, "seq");
      if (!r.get(s.timestamp_us)) return truncated(r, "timestamp");
      if (!r.get(count)) return truncated(r, "joint count");
      if (auto e = check_count(r, count, expected_joint_count)) return *e;
      for (auto& v : s.contact_force_truth) {
        if (!r.get_f64(v)) return truncated(r, "contact_force_truth");
      }
      if (r.remaining() < 16u * count) return truncated(r, "joint vectors");
      s.q_current.resize(count);
      s.qd_current.resize(count);
      for (auto& v : s.q_current) r.get_f64(v);
      for (auto& v : s.qd_current) r.get_f64(v);
      if (auto e = check_tail(r)) return *e;
      return Message{std::move(s)};
    }
    case FrameType::OperatorPose: {
      OperatorPose p;
      if (!r.get(p.seq)) return truncated(r, "seq");
      if (!r.get(p.timestamp_us)) return truncated(r, "timestamp");
      for (auto& v : p.position) {
        if (!r.get_f64(v)) return truncated(r, "position");
      }
      for (auto& v : p.orientation) {
        if (!r.get_f64(v)) return truncated(r, "orientation");
      }
      if (auto e = check_tail(r)) return *e;
      return Message{p};
    }
  }
  return make_error(DecodeErrorKind::UnknownTag, 0, "unknown type tag 0x" + [tag] {
    const char* hex = "0123456789ABCDEF";
    return std::string{hex[tag >> 4], hex[tag & 0xF]};
  }());
}

bool bit_equal(const Message& a, const Message& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&b](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b);
        if constexpr (std::is_same_v<T, Handshake>) {
          return x.protocol_version == y.protocol_version && x.chain_name == y.chain_name &&
                 x.joint_count == y.joint_count && x.tick_rate_hz == y.tick_rate_hz;
        } else if constexpr (std::is_same_v<T, LeaderCommand>) {
          return x.seq == y.seq && x.timestamp_us == y.timestamp_us && same_bits(x.q_target, y.q_target) &&
                 same_bits(x.gripper, y.gripper);
        } else if constexpr (std::is_same_v<T, FollowerState>) {
          return x.seq == y.seq && x.timestamp_us == y.timestamp_us && same_bits(x.q_current, y.q_current) &&
                 same_bits(x.qd_current, y.qd_current) && same_bits(x.contact_force_truth, y.contact_force_truth);
        } else {
          return x.seq == y.seq && x.timestamp_us == y.timestamp_us && same_bits(x.position, y.position) &&
                 same_bits(x.orientation, y.orientation);
        }
      },
      a);
}

bool SequenceGate::accept(std::uint32_t seq) {
  if (last_ && seq <= *last_) return false;
  last_ = seq;
  return true;
}

StaleAction stale_command_policy(const LeaderCommand& /*last_applied*/, std::int64_t age_ticks,
                                 std::int64_t timeout_ticks) {
  return age_ticks <= timeout_ticks ? StaleAction::Hold : StaleAction::SoftStop;
}

}  // namespace teleop::protocol
