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

// Stability metrics over traces. Jerk is the per-tick third difference
//
//   j[n] = s[n+2] - 3 s[n+1] + 3 s[n] - s[n-1]
//
// (unit-free per tick; for vector signals, the norm of the vector
// difference).

#pragma once

#include <span>
#include <string>
#include <vector>

#include "teleop/feedback.hpp"
#include "teleop/teleop_loop.hpp"

namespace teleop {

/// Energy above f_cutoff over total energy, DC excluded, mean removed.
/// Returns 0 for a signal with no varying energy. Throws std::invalid_argument
/// for fewer than 16 samples or a cutoff at or above Nyquist.
double high_freq_energy_ratio(std::span<const double> signal, double dt, double f_cutoff);

/// Energy-weighted over the axes of a vector signal: sum of per-axis
/// high-band energy over sum of per-axis energy.
double high_freq_energy_ratio(std::span<const Vec3> signal, double dt, double f_cutoff);

/// |third difference| per tick; size N - 3. Throws below 4 samples.
std::vector<double> jerk_series(std::span<const double> signal);
std::vector<double> jerk_series(std::span<const Vec3> signal);

/// Largest windowed maximum of |jerk| over windows of `window_ticks`
/// jerk samples (the window is shortened to the series when longer).
double max_local_jerk(std::span<const double> signal, int window_ticks);
double max_local_jerk(std::span<const Vec3> signal, int window_ticks);

struct JerkAnomaly {
  double percent = 0.0;
  double threshold = 0.0;  // mu + 3 sigma of baseline |jerk|
  bool degenerate_baseline = false;  // sigma = 0; threshold fell back to mu + eps
};

inline constexpr std::size_t kMinBaselineSamples = 32;

/// Percentage of evaluated |jerk| samples above the baseline threshold.
/// Both arguments are jerk magnitudes. Throws when the baseline has fewer
/// than kMinBaselineSamples samples or the evaluated series is empty.
JerkAnomaly jerk_anomaly_from_jerk(std::span<const double> evaluated, std::span<const double> baseline);

/// Same, from raw signals.
JerkAnomaly jerk_anomaly_pct(std::span<const Vec3> signal, std::span<const Vec3> baseline_segment);

struct Correlation {
  double r = 0.0;
  bool defined = false;  // false below 2 masked samples or for zero variance
  std::size_t samples = 0;
};

/// Pearson r over the ticks where mask is true.
Correlation feedback_correlation(std::span<const double> rendered, std::span<const double> truth,
                                 const std::vector<bool>& mask);

struct MetricsConfig {
  double f_cutoff = 5.0;  // Hz
  int jerk_window_ticks = 20;
};

struct StabilityReport {
  std::string scenario;
  VelocityTransform transform = VelocityTransform::Squared;
  std::size_t ticks = 0;
  std::size_t contact_ticks = 0;
  double mean_factor = 0.0;
  double high_freq_energy_ratio = 0.0;
  double max_local_jerk = 0.0;
  JerkAnomaly jerk_anomaly;
  Correlation feedback_correlation;
};

bool operator==(const StabilityReport& a, const StabilityReport& b);

/// Tick spacing of a trace, from its first two timestamps.
double trace_dt(const std::vector<TraceRecord>& trace);

/// Metrics over the leader end-effector position. The jerk baseline is the
/// span before the first contact tick (the whole trace when there is none).
StabilityReport compute_stability_report(const std::vector<TraceRecord>& trace, const std::string& scenario,
                                         VelocityTransform transform, const MetricsConfig& config = {});

/// One JSON object; undefined correlation is written as null.
std::string report_json(const StabilityReport& report);

}  // namespace teleop
