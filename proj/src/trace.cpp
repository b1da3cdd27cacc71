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

#include "teleop/trace.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include "json.hpp"

namespace teleop {

namespace {

static_assert(std::endian::native == std::endian::little, "binary traces assume a little-endian host");

using nlohmann::json;

json vec_json(const VecX& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }
json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
json pose_json(const Pose& p) {
  const auto& c = p.orientation.coeffs();
  return json{{"position", vec3_json(p.position)}, {"orientation", json::array({c.x(), c.y(), c.z(), c.w()})}};
}

Vec3 vec3_from(const json& j, const char* key) {
  const auto v = j.at(key).get<std::vector<double>>();
  if (v.size() != 3) throw std::invalid_argument(std::string(key) + ": expected 3 values");
  return {v[0], v[1], v[2]};
}

VecX vecx_from(const json& j, const char* key) {
  const auto v = j.at(key).get<std::vector<double>>();
  return Eigen::Map<const VecX>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Pose pose_from(const json& j, const char* key) {
  const json& p = j.at(key);
  Pose out;
  out.position = vec3_from(p, "position");
  const auto q = p.at("orientation").get<std::vector<double>>();
  if (q.size() != 4) throw std::invalid_argument(std::string(key) + ".orientation: expected 4 values");
  out.orientation.coeffs() << q[0], q[1], q[2], q[3];
  return out;
}

// Binary encoding.

class Sink {
 public:
  explicit Sink(std::ostream& out) : out_(out) {}
  template <typename T>
  void put(T v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  void put(const Vec3& v) {
    for (int i = 0; i < 3; ++i) put(v[i]);
  }
  void put(const VecX& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) put(v[i]);
  }
  void put(const Pose& p) {
    put(p.position);
    for (int i = 0; i < 4; ++i) put(p.orientation.coeffs()[i]);
  }

 private:
  std::ostream& out_;
};

class Source {
 public:
  explicit Source(std::istream& in) : in_(in) {}
  template <typename T>
  T get() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof v);
    if (in_.gcount() != static_cast<std::streamsize>(sizeof v)) throw std::runtime_error("binary trace: truncated");
    return v;
  }
  Vec3 vec3() {
    Vec3 v;
    for (int i = 0; i < 3; ++i) v[i] = get<double>();
    return v;
  }
  VecX vecx(std::size_t n) {
    VecX v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = get<double>();
    return v;
  }
  Pose pose() {
    Pose p;
    p.position = vec3();
    for (int i = 0; i < 4; ++i) p.orientation.coeffs()[i] = get<double>();
    return p;
  }
  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::istream& in_;
};

constexpr std::uint32_t kBinaryVersion = 1;

}  // namespace

TraceParseError::TraceParseError(std::size_t line, const std::string& what)
    : std::runtime_error("trace line " + std::to_string(line) + ": " + what), line_(line) {}

std::string to_ndjson(const TraceRecord& r, TraceFields fields) {
  json j{{"tick", r.tick},
         {"time", r.time},
         {"operator_present", r.operator_present},
         {"hand_position", vec3_json(r.hand_position)},
         {"leader_ee", pose_json(r.leader_ee)},
         {"follower_target", pose_json(r.follower_target)},
         {"follower_actual", pose_json(r.follower_actual)},
         {"delta_ee", vec3_json(r.delta_ee)},
         {"v_cartesian", vec3_json(r.v_cartesian)},
         {"factor", r.factor},
         {"virtual_target", vec3_json(r.virtual_target)},
         {"kp", vec_json(r.kp)},
         {"kd", vec_json(r.kd)},
         {"in_contact", r.in_contact},
         {"rendered_force", vec3_json(r.rendered_force)},
         {"leader_q", vec_json(r.leader_q)},
         {"follower_q", vec_json(r.follower_q)},
         {"applied_seq", r.applied_seq},
         {"ik_converged", r.ik_converged}};
  if (fields == TraceFields::Full) j["contact_force_truth"] = vec3_json(r.contact_force_truth);
  return j.dump();
}

TraceRecord parse_ndjson_record(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("record is not a JSON object");
  try {
    TraceRecord r;
    r.tick = j.at("tick").get<std::int64_t>();
    r.time = j.at("time").get<double>();
    r.operator_present = j.at("operator_present").get<bool>();
    r.hand_position = vec3_from(j, "hand_position");
    r.leader_ee = pose_from(j, "leader_ee");
    r.follower_target = pose_from(j, "follower_target");
    r.follower_actual = pose_from(j, "follower_actual");
    r.delta_ee = vec3_from(j, "delta_ee");
    r.v_cartesian = vec3_from(j, "v_cartesian");
    r.factor = j.at("factor").get<double>();
    r.virtual_target = vec3_from(j, "virtual_target");
    r.kp = vecx_from(j, "kp");
    r.kd = vecx_from(j, "kd");
    r.contact_force_truth = vec3_from(j, "contact_force_truth");
    r.in_contact = j.at("in_contact").get<bool>();
    r.rendered_force = vec3_from(j, "rendered_force");
    r.leader_q = vecx_from(j, "leader_q");
    r.follower_q = vecx_from(j, "follower_q");
    r.applied_seq = j.at("applied_seq").get<std::uint32_t>();
    r.ik_converged = j.at("ik_converged").get<bool>();
    return r;
  } catch (const json::exception& e) {
    throw std::invalid_argument(e.what());
  }
}

NdjsonTraceWriter::NdjsonTraceWriter(const std::filesystem::path& path) : out_(path, std::ios::trunc) {
  if (!out_) throw std::runtime_error("cannot open trace file " + path.string());
}

void NdjsonTraceWriter::write(const TraceRecord& rec) {
  out_ << to_ndjson(rec) << '\n';
  out_.flush();
  if (!out_) throw std::runtime_error("trace write failed");
}

void write_ndjson(std::ostream& out, const std::vector<TraceRecord>& trace) {
  for (const auto& r : trace) out << to_ndjson(r) << '\n';
}

void write_ndjson(const std::filesystem::path& path, const std::vector<TraceRecord>& trace) {
  NdjsonTraceWriter w(path);
  for (const auto& r : trace) w.write(r);
}

std::vector<TraceRecord> read_ndjson(std::istream& in) {
  std::vector<TraceRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(parse_ndjson_record(line));
    } catch (const std::invalid_argument& e) {
      throw TraceParseError(n, e.what());
    }
  }
  return out;
}

std::vector<TraceRecord> read_ndjson(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file " + path.string());
  return read_ndjson(in);
}

void write_binary(std::ostream& out, const std::vector<TraceRecord>& trace) {
  const std::size_t nl = trace.empty() ? 0 : static_cast<std::size_t>(trace.front().leader_q.size());
  const std::size_t nf = trace.empty() ? 0 : static_cast<std::size_t>(trace.front().follower_q.size());
  out.write(kBinaryTraceMagic, sizeof kBinaryTraceMagic);
  Sink s(out);
  s.put(kBinaryVersion);
  s.put(static_cast<std::uint16_t>(nl));
  s.put(static_cast<std::uint16_t>(nf));
  for (const auto& r : trace) {
    if (static_cast<std::size_t>(r.leader_q.size()) != nl || static_cast<std::size_t>(r.kp.size()) != nl ||
        static_cast<std::size_t>(r.kd.size()) != nl || static_cast<std::size_t>(r.follower_q.size()) != nf) {
      throw std::invalid_argument("write_binary: records disagree on joint counts");
    }
    s.put(r.tick);
    s.put(r.time);
    s.put(static_cast<std::uint8_t>((r.operator_present ? 1 : 0) | (r.in_contact ? 2 : 0) | (r.ik_converged ? 4 : 0)));
    s.put(r.hand_position);
    s.put(r.leader_ee);
    s.put(r.follower_target);
    s.put(r.follower_actual);
    s.put(r.delta_ee);
    s.put(r.v_cartesian);
    s.put(r.factor);
    s.put(r.virtual_target);
    s.put(r.kp);
    s.put(r.kd);
    s.put(r.contact_force_truth);
    s.put(r.rendered_force);
    s.put(r.leader_q);
    s.put(r.follower_q);
    s.put(r.applied_seq);
  }
}

void write_binary(const std::filesystem::path& path, const std::vector<TraceRecord>& trace) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open trace file " + path.string());
  write_binary(out, trace);
  if (!out) throw std::runtime_error("trace write failed");
}

std::vector<TraceRecord> read_binary(std::istream& in) {
  char magic[sizeof kBinaryTraceMagic];
  in.read(magic, sizeof magic);
  if (in.gcount() != static_cast<std::streamsize>(sizeof magic) ||
      std::memcmp(magic, kBinaryTraceMagic, sizeof magic) != 0) {
    throw std::runtime_error("binary trace: bad magic");
  }
  Source s(in);
  if (s.get<std::uint32_t>() != kBinaryVersion) throw std::runtime_error("binary trace: unsupported version");
  const std::size_t nl = s.get<std::uint16_t>();
  const std::size_t nf = s.get<std::uint16_t>();
  std::vector<TraceRecord> out;
  while (!s.at_end()) {
    TraceRecord r;
    r.tick = s.get<std::int64_t>();
    r.time = s.get<double>();
    const auto flags = s.get<std::uint8_t>();
    r.operator_present = (flags & 1) != 0;
    r.in_contact = (flags & 2) != 0;
    r.ik_converged = (flags & 4) != 0;
    r.hand_position = s.vec3();
    r.leader_ee = s.pose();
    r.follower_target = s.pose();
    r.follower_actual = s.pose();
    r.delta_ee = s.vec3();
    r.v_cartesian = s.vec3();
    r.factor = s.get<double>();
    r.virtual_target = s.vec3();
    r.kp = s.vecx(nl);
    r.kd = s.vecx(nl);
    r.contact_force_truth = s.vec3();
    r.rendered_force = s.vec3();
    r.leader_q = s.vecx(nl);
    r.follower_q = s.vecx(nf);
    r.applied_seq = s.get<std::uint32_t>();
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<TraceRecord> read_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trace file " + path.string());
  return read_binary(in);
}

}  // namespace teleop
