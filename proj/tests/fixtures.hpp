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

#include <filesystem>
#include <string>

#include "teleop/arm_model.hpp"
#include "teleop/scenario.hpp"

namespace fixtures {

inline std::filesystem::path config_dir() { return TELEOP_TEST_CONFIG_DIR; }

inline teleop::KinematicChain leader3() { return teleop::load_chain(config_dir() / "chains" / "leader3.chain"); }
inline teleop::KinematicChain follower7() {
  return teleop::load_chain(config_dir() / "chains" / "follower7.chain");
}

inline teleop::Scenario scenario(const std::string& name) {
  return teleop::load_scenario(config_dir() / "scenarios" / (name + ".scenario"));
}

}  // namespace fixtures
