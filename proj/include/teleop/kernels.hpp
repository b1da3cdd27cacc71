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

// Hot loops with a serial reference and an OpenMP version. Each output
// element is computed by the same sequence of operations in both, so the
// results are bit-identical.

#pragma once

#include <span>
#include <vector>

#include "teleop/arm_model.hpp"
#include "teleop/kinematics.hpp"

namespace teleop {

/// One-sided power |X_k|^2, k = 1..N/2, of the mean-removed signal (direct
/// DFT over a twiddle table). Bin k sits at k / (N dt).
std::vector<double> power_spectrum_serial(std::span<const double> signal);
std::vector<double> power_spectrum_parallel(std::span<const double> signal);

struct IkJob {
  Pose target;
  VecX seed;
};

std::vector<IkResult> batch_ik_serial(const KinematicChain& chain, std::span<const IkJob> jobs,
                                      const IkTaskWeights& weights, const IkParams& params);
std::vector<IkResult> batch_ik_parallel(const KinematicChain& chain, std::span<const IkJob> jobs,
                                        const IkTaskWeights& weights, const IkParams& params);

}  // namespace teleop
