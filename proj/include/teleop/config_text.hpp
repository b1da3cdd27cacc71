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

// Reader for the flat sectioned text format shared by chain and scenario
// files:
//
//   # comment
//   [section]
//   key = value
//
// Sections may repeat ([joint], [obstacle], [waypoint]) and keep file order.

#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "teleop/types.hpp"

namespace teleop {

/// Malformed text: reported with the 1-based line and column of the fault.
class ConfigSyntaxError : public std::runtime_error {
 public:
  ConfigSyntaxError(int line, int column, const std::string& what);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Well-formed text that violates model invariants. Carries every violation
/// found, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct ConfigSection {
  std::string name;
  int line = 0;
  std::vector<ConfigEntry> entries;
};

struct ConfigDocument {
  std::vector<ConfigSection> sections;
};

ConfigDocument parse_config_text(std::string_view text);

/// Typed, consumption-tracking access to one section. Conversion failures and
/// missing required keys are appended to the shared issue list instead of
/// throwing, so a whole file can be checked in one pass.
class SectionReader {
 public:
  SectionReader(const ConfigSection& section, std::vector<std::string>& issues);

  bool has(std::string_view key) const;

  std::string get_string(std::string_view key, const std::string& fallback);
  std::string require_string(std::string_view key);
  double get_double(std::string_view key, double fallback);
  double require_double(std::string_view key);
  std::int64_t get_int(std::string_view key, std::int64_t fallback);
  bool get_bool(std::string_view key, bool fallback);
  Vec3 get_vec3(std::string_view key, const Vec3& fallback);
  Vec3 require_vec3(std::string_view key);
  /// Scalar-last quaternion "x y z w". Not normalized.
  Quat get_quat(std::string_view key, const Quat& fallback);
  VecX get_vector(std::string_view key, const VecX& fallback);
  std::vector<double> require_numbers(std::string_view key, std::size_t count);

  /// Reports every key that was never read as "unknown key".
  void finish();

  std::string where(std::string_view key) const;

 private:
  const ConfigEntry* find(std::string_view key);
  bool parse_numbers(const ConfigEntry& e, std::vector<double>& out);

  const ConfigSection& section_;
  std::vector<std::string>& issues_;
  std::set<std::string, std::less<>> consumed_;
};

/// Round-trip-exact decimal rendering of a double.
std::string format_double(double v);
std::string format_vec3(const Vec3& v);
std::string format_quat(const Quat& q);
std::string format_vector(const VecX& v);

}  // namespace teleop
