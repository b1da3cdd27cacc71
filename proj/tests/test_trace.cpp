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


#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "teleop/trace.hpp"

using namespace teleop;

namespace {

std::vector<TraceRecord> short_trace() {
  auto s = fixtures::scenario("hidden_wall_drag");
  s.duration = 3.0;
  return run_teleop_loop(s);
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("teleop_test_trace_" + name);
}

}  // namespace

TEST_CASE("ndjson round trip is exact") {
  const auto t = short_trace();
  std::stringstream ss;
  write_ndjson(ss, t);
  const auto back = read_ndjson(ss);
  REQUIRE(back.size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i) REQUIRE(back[i] == t[i]);
}

TEST_CASE("field names are fixed") {
  const auto line = to_ndjson(short_trace().front());
  for (const char* key : {"\"tick\"", "\"time\"", "\"leader_ee\"", "\"follower_target\"", "\"follower_actual\"",
                          "\"delta_ee\"", "\"factor\"", "\"rendered_force\"", "\"contact_force_truth\"",
                          "\"applied_seq\""}) {
    CHECK(line.find(key) != std::string::npos);
  }
  CHECK(line.find('\n') == std::string::npos);
}

TEST_CASE("display records omit the ground-truth force") {
  const auto line = to_ndjson(short_trace().back(), TraceFields::Display);
  CHECK(line.find("contact_force_truth") == std::string::npos);
  CHECK(line.find("rendered_force") != std::string::npos);
}

TEST_CASE("parse errors name the line") {
  const auto t = short_trace();
  std::string text;
  for (int i = 0; i < 3; ++i) text += to_ndjson(t[static_cast<std::size_t>(i)]) + "\n";
  SUBCASE("malformed middle line") {
    std::string bad = text;
    bad.insert(bad.find('\n') + 1, "{\"tick\": oops}\n");
    std::istringstream in(bad);
    try {
      read_ndjson(in);
      FAIL("expected a parse error");
    } catch (const TraceParseError& e) {
      CHECK(e.line() == 2);
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  SUBCASE("truncated last line") {
    const std::string cut = text.substr(0, text.size() - 20);
    std::istringstream in(cut);
    try {
      read_ndjson(in);
      FAIL("expected a parse error");
    } catch (const TraceParseError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("missing field") {
    std::istringstream in("{\"tick\": 1}\n");
    CHECK_THROWS_AS(read_ndjson(in), TraceParseError);
  }
}

TEST_CASE("writer leaves a readable prefix") {
  const auto t = short_trace();
  const auto path = temp_path("prefix.ndjson");
  {
    NdjsonTraceWriter w(path);
    for (std::size_t i = 0; i < 10; ++i) w.write(t[i]);
    // Readable while the writer is still open.
    CHECK(read_ndjson(path).size() == 10);
  }
  std::filesystem::remove(path);
}

TEST_CASE("binary round trip and header checks") {
  const auto t = short_trace();
  std::stringstream ss;
  write_binary(ss, t);
  const std::string bytes = ss.str();
  CHECK(bytes.compare(0, 8, std::string(kBinaryTraceMagic, 8)) == 0);
  std::istringstream in(bytes);
  const auto back = read_binary(in);
  REQUIRE(back.size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i) REQUIRE(back[i] == t[i]);

  std::istringstream bad_magic("NOTATRACE" + bytes.substr(9));
  CHECK_THROWS_AS(read_binary(bad_magic), std::runtime_error);
  std::istringstream cut(bytes.substr(0, bytes.size() - 5));
  CHECK_THROWS_AS(read_binary(cut), std::runtime_error);
}

TEST_CASE("file helpers") {
  const auto t = short_trace();
  const auto a = temp_path("a.ndjson"), b = temp_path("b.bin");
  write_ndjson(a, t);
  write_binary(b, t);
  CHECK(read_ndjson(a) == read_binary(b));
  std::filesystem::remove(a);
  std::filesystem::remove(b);
  CHECK_THROWS_AS(read_ndjson(temp_path("missing.ndjson")), std::runtime_error);
}
