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

// `teleop run|ablate|metrics|bridge`. Exit codes: 0 success, 1 invalid
// input (flags, scenario or trace files), 2 runtime fault. Log verbosity
// comes from TELEOP_LOG_LEVEL (trace, debug, info, warn, error, off).

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace teleop {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;

/// A bare name resolves to <config dir>/scenarios/<name>.scenario; anything
/// that looks like a path is taken as is.
std::filesystem::path resolve_scenario(const std::string& name_or_path);

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace teleop
