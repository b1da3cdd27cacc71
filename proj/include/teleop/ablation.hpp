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

#include <span>
#include <string>
#include <vector>

#include "teleop/metrics.hpp"
#include "teleop/scenario.hpp"

namespace teleop {

/// One closed-loop run per transform, same scenario and seed, in input order.
/// The OpenMP version runs the transforms concurrently and returns the same
/// reports as the serial one.
std::vector<StabilityReport> ablation_report(const Scenario& scenario, std::span<const VelocityTransform> transforms,
                                             const MetricsConfig& config = {});
std::vector<StabilityReport> ablation_report_serial(const Scenario& scenario,
                                                    std::span<const VelocityTransform> transforms,
                                                    const MetricsConfig& config = {});

struct RankedReport {
  StabilityReport report;
  double mean_rank = 0.0;
};

/// Ranks each metric across reports (1 = best; ties share the mean rank).
/// Lower is better for the energy ratio, jerk and anomaly; higher is better
/// for correlation, with undefined correlation ranked last. Sorted by mean
/// rank, input order breaking ties.
std::vector<RankedReport> rank_reports(const std::vector<StabilityReport>& reports);

/// Aligned plain-text comparison table of the ranked reports.
std::string comparison_table(const std::vector<StabilityReport>& reports);

/// Mean factor re-evaluated with `transform` on the ticks of `trace` whose
/// Cartesian speed exceeds `min_speed`, from the recorded deviation and
/// velocity. Throws when no tick qualifies.
double mean_factor_above_speed(const std::vector<TraceRecord>& trace, const FeedbackParams& params,
                               VelocityTransform transform, double min_speed);

}  // namespace teleop
