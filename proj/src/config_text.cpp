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

#include "teleop/config_text.hpp"

#include <charconv>
#include <sstream>

namespace teleop {

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::string out = "invalid configuration:";
  for (const auto& i : issues) {
    out += "\n  - ";
    out += i;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool is_key_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

}  // namespace

ConfigSyntaxError::ConfigSyntaxError(int line, int column, const std::string& what)
    : std::runtime_error("syntax error at line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

ConfigDocument parse_config_text(std::string_view text) {
  ConfigDocument doc;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;

    // Comments run to end of line.
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto indent = raw.find_first_not_of(" \t\r");
    if (indent == std::string_view::npos) continue;
    const std::string_view line = trim(raw);
    const int col0 = static_cast<int>(indent) + 1;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigSyntaxError(line_no, col0 + static_cast<int>(line.size()), "expected ']'");
      const std::string_view name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) throw ConfigSyntaxError(line_no, col0 + 1, "empty section name");
      for (std::size_t i = 0; i < name.size(); ++i) {
        if (!is_key_char(name[i])) {
          throw ConfigSyntaxError(line_no, col0 + 1 + static_cast<int>(i), "invalid character in section name");
        }
      }
      doc.sections.push_back(ConfigSection{std::string(name), line_no, {}});
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigSyntaxError(line_no, col0, "expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigSyntaxError(line_no, col0, "missing key before '='");
    for (std::size_t i = 0; i < key.size(); ++i) {
      if (!is_key_char(key[i])) {
        throw ConfigSyntaxError(line_no, col0 + static_cast<int>(i), "invalid character in key");
      }
    }
    if (doc.sections.empty()) throw ConfigSyntaxError(line_no, col0, "key outside of any [section]");
    auto& entries = doc.sections.back().entries;
    for (const auto& e : entries) {
      if (e.key == key) {
        throw ConfigSyntaxError(line_no, col0, "duplicate key '" + std::string(key) + "' (first at line " +
                                                    std::to_string(e.line) + ")");
      }
    }
    entries.push_back(ConfigEntry{std::string(key), std::string(trim(line.substr(eq + 1))), line_no});
  }
  return doc;
}

SectionReader::SectionReader(const ConfigSection& section, std::vector<std::string>& issues)
    : section_(section), issues_(issues) {}

bool SectionReader::has(std::string_view key) const {
  for (const auto& e : section_.entries) {
    if (e.key == key) return true;
  }
  return false;
}

const ConfigEntry* SectionReader::find(std::string_view key) {
  for (const auto& e : section_.entries) {
    if (e.key == key) {
      consumed_.insert(e.key);
      return &e;
    }
  }
  return nullptr;
}

std::string SectionReader::where(std::string_view key) const {
  for (const auto& e : section_.entries) {
    if (e.key == key) return "[" + section_.name + "] line " + std::to_string(e.line) + " '" + e.key + "'";
  }
  return "[" + section_.name + "] at line " + std::to_string(section_.line);
}

bool SectionReader::parse_numbers(const ConfigEntry& e, std::vector<double>& out) {
  out.clear();
  const char* p = e.value.data();
  const char* end = p + e.value.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\t' || *p == ',')) ++p;
    if (p == end) break;
    double v = 0.0;
    const auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc() || (next < end && *next != ' ' && *next != '\t' && *next != ',')) {
      issues_.push_back(where(e.key) + ": expected decimal number(s), got '" + e.value + "'");
      return false;
    }
    out.push_back(v);
    p = next;
  }
  return true;
}

std::string SectionReader::get_string(std::string_view key, const std::string& fallback) {
  const auto* e = find(key);
  return e ? e->value : fallback;
}

std::string SectionReader::require_string(std::string_view key) {
  const auto* e = find(key);
  if (!e) {
    issues_.push_back("[" + section_.name + "] at line " + std::to_string(section_.line) + ": missing key '" +
                      std::string(key) + "'");
    return {};
  }
  return e->value;
}

std::vector<double> SectionReader::require_numbers(std::string_view key, std::size_t count) {
  const auto* e = find(key);
  if (!e) {
    issues_.push_back("[" + section_.name + "] at line " + std::to_string(section_.line) + ": missing key '" +
                      std::string(key) + "'");
    return std::vector<double>(count, 0.0);
  }
  std::vector<double> v;
  if (!parse_numbers(*e, v)) return std::vector<double>(count, 0.0);
  if (v.size() != count) {
    issues_.push_back(where(key) + ": expected " + std::to_string(count) + " number(s), got " +
                      std::to_string(v.size()));
    return std::vector<double>(count, 0.0);
  }
  return v;
}

double SectionReader::get_double(std::string_view key, double fallback) {
  if (!has(key)) return fallback;
  return require_numbers(key, 1)[0];
}

double SectionReader::require_double(std::string_view key) { return require_numbers(key, 1)[0]; }

std::int64_t SectionReader::get_int(std::string_view key, std::int64_t fallback) {
  const auto* e = find(key);
  if (!e) return fallback;
  std::int64_t v = 0;
  const auto [next, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
  if (ec != std::errc() || next != e->value.data() + e->value.size()) {
    issues_.push_back(where(key) + ": expected integer, got '" + e->value + "'");
    return fallback;
  }
  return v;
}

bool SectionReader::get_bool(std::string_view key, bool fallback) {
  const auto* e = find(key);
  if (!e) return fallback;
  if (e->value == "true" || e->value == "1") return true;
  if (e->value == "false" || e->value == "0") return false;
  issues_.push_back(where(key) + ": expected true/false, got '" + e->value + "'");
  return fallback;
}

Vec3 SectionReader::get_vec3(std::string_view key, const Vec3& fallback) {
  if (!has(key)) return fallback;
  return require_vec3(key);
}

Vec3 SectionReader::require_vec3(std::string_view key) {
  const auto v = require_numbers(key, 3);
  return Vec3(v[0], v[1], v[2]);
}

Quat SectionReader::get_quat(std::string_view key, const Quat& fallback) {
  if (!has(key)) return fallback;
  const auto v = require_numbers(key, 4);
  return Quat(v[3], v[0], v[1], v[2]);
}

VecX SectionReader::get_vector(std::string_view key, const VecX& fallback) {
  const auto* e = find(key);
  if (!e) return fallback;
  std::vector<double> v;
  if (!parse_numbers(*e, v)) return fallback;
  return Eigen::Map<const VecX>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void SectionReader::finish() {
  for (const auto& e : section_.entries) {
    if (!consumed_.contains(e.key)) {
      issues_.push_back("[" + section_.name + "] line " + std::to_string(e.line) + ": unknown key '" + e.key + "'");
    }
  }
}

std::string format_double(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string format_vec3(const Vec3& v) {
  return format_double(v.x()) + " " + format_double(v.y()) + " " + format_double(v.z());
}

std::string format_quat(const Quat& q) {
  return format_double(q.x()) + " " + format_double(q.y()) + " " + format_double(q.z()) + " " +
         format_double(q.w());
}

std::string format_vector(const VecX& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v[i]);
  }
  return out;
}

}  // namespace teleop
