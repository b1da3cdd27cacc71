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

// Trace serialization. NDJSON: one record per line, fixed field names,
// doubles printed round-trip exact. Binary: magic header followed by
// fixed-size little-endian records.

#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "teleop/teleop_loop.hpp"

namespace teleop {

class TraceParseError : public std::runtime_error {
 public:
  TraceParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Display records omit contact_force_truth (operator-facing streams).
enum class TraceFields { Full, Display };

std::string to_ndjson(const TraceRecord& rec, TraceFields fields = TraceFields::Full);

/// Parses one full record line. Throws std::invalid_argument.
TraceRecord parse_ndjson_record(std::string_view line);

/// Writes each record as a line and flushes, so an interrupted run leaves a
/// readable prefix.
class NdjsonTraceWriter {
 public:
  explicit NdjsonTraceWriter(const std::filesystem::path& path);
  void write(const TraceRecord& rec);

 private:
  std::ofstream out_;
};

void write_ndjson(std::ostream& out, const std::vector<TraceRecord>& trace);
void write_ndjson(const std::filesystem::path& path, const std::vector<TraceRecord>& trace);

/// Throws TraceParseError naming the 1-based line of the first bad record.
std::vector<TraceRecord> read_ndjson(std::istream& in);
std::vector<TraceRecord> read_ndjson(const std::filesystem::path& path);

inline constexpr char kBinaryTraceMagic[8] = {'V', 'F', 'T', 'R', 'A', 'C', 'E', '1'};

void write_binary(std::ostream& out, const std::vector<TraceRecord>& trace);
void write_binary(const std::filesystem::path& path, const std::vector<TraceRecord>& trace);
/// Throws std::runtime_error on a bad header or a truncated record.
std::vector<TraceRecord> read_binary(std::istream& in);
std::vector<TraceRecord> read_binary(const std::filesystem::path& path);

}  // namespace teleop
