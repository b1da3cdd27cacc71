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

#include "teleop/ablation.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <numeric>
#include <stdexcept>

#include "teleop/config_text.hpp"
#include "teleop/teleop_loop.hpp"

namespace teleop {

namespace {

StabilityReport run_one(const Scenario& scenario, VelocityTransform t, const MetricsConfig& config) {
  Scenario s = scenario;
  s.feedback.transform = t;
  return compute_stability_report(run_teleop_loop(s), s.name, t, config);
}

// Ranks with ties sharing the mean of their positions.
std::vector<double> ranks(const std::vector<double>& keys) {
  const std::size_t n = keys.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && keys[order[j + 1]] == keys[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) out[order[k]] = r;
    i = j + 1;
  }
  return out;
}

}  // namespace

std::vector<StabilityReport> ablation_report_serial(const Scenario& scenario,
                                                    std::span<const VelocityTransform> transforms,
                                                    const MetricsConfig& config) {
  std::vector<StabilityReport> out;
  out.reserve(transforms.size());
  for (const auto t : transforms) out.push_back(run_one(scenario, t, config));
  return out;
}

std::vector<StabilityReport> ablation_report(const Scenario& scenario, std::span<const VelocityTransform> transforms,
                                             const MetricsConfig& config) {
  auto issues = validate_scenario(scenario);
  if (!issues.empty()) throw ConfigError(std::move(issues));
  std::vector<StabilityReport> out(transforms.size());
  std::vector<std::exception_ptr> errors(transforms.size());
  const auto n = static_cast<std::ptrdiff_t>(transforms.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = run_one(scenario, transforms[k], config);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<RankedReport> rank_reports(const std::vector<StabilityReport>& reports) {
  const std::size_t n = reports.size();
  std::vector<double> hf(n), jerk(n), anomaly(n), corr(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = reports[i];
    hf[i] = r.high_freq_energy_ratio;
    jerk[i] = r.max_local_jerk;
    anomaly[i] = r.jerk_anomaly.percent;
    // Negated so that lower keys rank first; undefined sorts last.
    corr[i] = r.feedback_correlation.defined ? -r.feedback_correlation.r : 2.0;
  }
  const auto rh = ranks(hf);
  const auto rj = ranks(jerk);
  const auto ra = ranks(anomaly);
  const auto rc = ranks(corr);
  std::vector<RankedReport> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].report = reports[i];
    out[i].mean_rank = (rh[i] + rj[i] + ra[i] + rc[i]) / 4.0;
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RankedReport& a, const RankedReport& b) { return a.mean_rank < b.mean_rank; });
  return out;
}

std::string comparison_table(const std::vector<StabilityReport>& reports) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-4s %-9s %11s %12s %14s %12s %11s %9s\n", "rank", "transform", "hf_ratio",
                "max_jerk", "jerk_anomaly_%", "correlation", "mean_factor", "mean_rank");
  out += line;
  int pos = 1;
  for (const auto& row : rank_reports(reports)) {
    const auto& r = row.report;
    char corr[32];
    if (r.feedback_correlation.defined) {
      std::snprintf(corr, sizeof corr, "%.4f", r.feedback_correlation.r);
    } else {
      std::snprintf(corr, sizeof corr, "undefined");
    }
    std::snprintf(line, sizeof line, "%-4d %-9s %11.4e %12.4e %14.3f %12s %11.5f %9.2f\n", pos++,
                  std::string(to_string(r.transform)).c_str(), r.high_freq_energy_ratio, r.max_local_jerk,
                  r.jerk_anomaly.percent, corr, r.mean_factor, row.mean_rank);
    out += line;
  }
  return out;
}

double mean_factor_above_speed(const std::vector<TraceRecord>& trace, const FeedbackParams& params,
                               VelocityTransform transform, double min_speed) {
  FeedbackParams p = params;
  p.transform = transform;
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& r : trace) {
    if (r.v_cartesian.norm() <= min_speed) continue;
    sum += feedback_factor(r.delta_ee, r.v_cartesian, p);
    ++count;
  }
  if (count == 0) throw std::invalid_argument("mean_factor_above_speed: no tick exceeds the speed threshold");
  return sum / static_cast<double>(count);
}

}  // namespace teleop
