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

#include "teleop/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "teleop/kernels.hpp"

namespace teleop {

namespace {

constexpr std::size_t kMinSpectrumSamples = 16;

struct BandEnergy {
  double high = 0.0;
  double total = 0.0;
};

BandEnergy band_energy(std::span<const double> signal, double dt, double f_cutoff) {
  if (signal.size() < kMinSpectrumSamples) {
    throw std::invalid_argument("high_freq_energy_ratio: need at least 16 samples");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("high_freq_energy_ratio: dt must be > 0");
  const double nyquist = 0.5 / dt;
  if (!(f_cutoff > 0.0) || f_cutoff >= nyquist) {
    throw std::invalid_argument("high_freq_energy_ratio: cutoff must lie in (0, Nyquist)");
  }
  const std::vector<double> power = power_spectrum_parallel(signal);
  const double df = 1.0 / (static_cast<double>(signal.size()) * dt);
  BandEnergy e;
  for (std::size_t k = 1; k <= power.size(); ++k) {
    e.total += power[k - 1];
    if (static_cast<double>(k) * df >= f_cutoff) e.high += power[k - 1];
  }
  return e;
}

std::vector<double> axis(std::span<const Vec3> signal, int i) {
  std::vector<double> out(signal.size());
  for (std::size_t n = 0; n < signal.size(); ++n) out[n] = signal[n][i];
  return out;
}

void check_jerk_length(std::size_t n) {
  if (n < 4) throw std::invalid_argument("jerk: need at least 4 samples");
}

double max_of(const std::vector<double>& v, int window_ticks) {
  if (window_ticks < 1) throw std::invalid_argument("max_local_jerk: window_ticks must be >= 1");
  // Every sample lies in some window, so the largest windowed maximum is the
  // largest sample.
  return *std::max_element(v.begin(), v.end());
}

std::vector<Vec3> leader_positions(const std::vector<TraceRecord>& trace, std::size_t end) {
  std::vector<Vec3> out;
  out.reserve(end);
  for (std::size_t i = 0; i < end; ++i) out.push_back(trace[i].leader_ee.position);
  return out;
}

nlohmann::json number_or_null(double v, bool defined) { return defined ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

double high_freq_energy_ratio(std::span<const double> signal, double dt, double f_cutoff) {
  const BandEnergy e = band_energy(signal, dt, f_cutoff);
  return e.total > 0.0 ? e.high / e.total : 0.0;
}

double high_freq_energy_ratio(std::span<const Vec3> signal, double dt, double f_cutoff) {
  BandEnergy sum;
  for (int i = 0; i < 3; ++i) {
    const auto a = axis(signal, i);
    const BandEnergy e = band_energy(a, dt, f_cutoff);
    sum.high += e.high;
    sum.total += e.total;
  }
  return sum.total > 0.0 ? sum.high / sum.total : 0.0;
}

std::vector<double> jerk_series(std::span<const double> s) {
  check_jerk_length(s.size());
  std::vector<double> out(s.size() - 3);
  for (std::size_t n = 1; n + 2 < s.size(); ++n) {
    out[n - 1] = std::abs(s[n + 2] - 3.0 * s[n + 1] + 3.0 * s[n] - s[n - 1]);
  }
  return out;
}

std::vector<double> jerk_series(std::span<const Vec3> s) {
  check_jerk_length(s.size());
  std::vector<double> out(s.size() - 3);
  for (std::size_t n = 1; n + 2 < s.size(); ++n) {
    out[n - 1] = (s[n + 2] - 3.0 * s[n + 1] + 3.0 * s[n] - s[n - 1]).norm();
  }
  return out;
}

double max_local_jerk(std::span<const double> signal, int window_ticks) {
  return max_of(jerk_series(signal), window_ticks);
}

double max_local_jerk(std::span<const Vec3> signal, int window_ticks) {
  return max_of(jerk_series(signal), window_ticks);
}

JerkAnomaly jerk_anomaly_from_jerk(std::span<const double> evaluated, std::span<const double> baseline) {
  if (baseline.size() < kMinBaselineSamples) {
    throw std::invalid_argument("jerk_anomaly: baseline needs at least " + std::to_string(kMinBaselineSamples) +
                                " samples");
  }
  if (evaluated.empty()) throw std::invalid_argument("jerk_anomaly: empty evaluated segment");
  double mean = 0.0;
  for (double v : baseline) mean += v;
  mean /= static_cast<double>(baseline.size());
  double var = 0.0;
  for (double v : baseline) var += (v - mean) * (v - mean);
  const double sigma = std::sqrt(var / static_cast<double>(baseline.size()));

  JerkAnomaly out;
  if (sigma > 0.0) {
    out.threshold = mean + 3.0 * sigma;
  } else {
    out.degenerate_baseline = true;
    out.threshold = mean + std::max(1.0, std::abs(mean)) * 1e-12;
  }
  const auto count = std::count_if(evaluated.begin(), evaluated.end(), [&](double v) { return v > out.threshold; });
  out.percent = 100.0 * static_cast<double>(count) / static_cast<double>(evaluated.size());
  return out;
}

JerkAnomaly jerk_anomaly_pct(std::span<const Vec3> signal, std::span<const Vec3> baseline_segment) {
  const auto evaluated = jerk_series(signal);
  if (baseline_segment.size() < kMinBaselineSamples + 3) {
    throw std::invalid_argument("jerk_anomaly: baseline segment too short");
  }
  const auto baseline = jerk_series(baseline_segment);
  return jerk_anomaly_from_jerk(evaluated, baseline);
}

Correlation feedback_correlation(std::span<const double> rendered, std::span<const double> truth,
                                 const std::vector<bool>& mask) {
  if (rendered.size() != truth.size() || mask.size() != truth.size()) {
    throw std::invalid_argument("feedback_correlation: series lengths differ");
  }
  Correlation c;
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    ++c.samples;
    ma += rendered[i];
    mb += truth[i];
  }
  if (c.samples < 2) return c;
  ma /= static_cast<double>(c.samples);
  mb /= static_cast<double>(c.samples);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    const double a = rendered[i] - ma;
    const double b = truth[i] - mb;
    sab += a * b;
    saa += a * a;
    sbb += b * b;
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) return c;
  c.r = std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
  c.defined = true;
  return c;
}

bool operator==(const StabilityReport& a, const StabilityReport& b) {
  return a.scenario == b.scenario && a.transform == b.transform && a.ticks == b.ticks &&
         a.contact_ticks == b.contact_ticks && a.mean_factor == b.mean_factor &&
         a.high_freq_energy_ratio == b.high_freq_energy_ratio && a.max_local_jerk == b.max_local_jerk &&
         a.jerk_anomaly.percent == b.jerk_anomaly.percent && a.jerk_anomaly.threshold == b.jerk_anomaly.threshold &&
         a.jerk_anomaly.degenerate_baseline == b.jerk_anomaly.degenerate_baseline &&
         a.feedback_correlation.r == b.feedback_correlation.r &&
         a.feedback_correlation.defined == b.feedback_correlation.defined &&
         a.feedback_correlation.samples == b.feedback_correlation.samples;
}

double trace_dt(const std::vector<TraceRecord>& trace) {
  if (trace.size() < 2) throw std::invalid_argument("trace_dt: need at least 2 records");
  const double dt = trace[1].time - trace[0].time;
  if (!(dt > 0.0)) throw std::invalid_argument("trace_dt: timestamps must increase");
  return dt;
}

StabilityReport compute_stability_report(const std::vector<TraceRecord>& trace, const std::string& scenario,
                                         VelocityTransform transform, const MetricsConfig& config) {
  const double dt = trace_dt(trace);
  StabilityReport rep;
  rep.scenario = scenario;
  rep.transform = transform;
  rep.ticks = trace.size();

  std::size_t first_contact = trace.size();
  std::vector<double> rendered(trace.size());
  std::vector<double> truth(trace.size());
  std::vector<bool> mask(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& r = trace[i];
    rep.mean_factor += r.factor;
    rendered[i] = r.rendered_force.norm();
    truth[i] = r.contact_force_truth.norm();
    mask[i] = r.in_contact;
    if (r.in_contact) {
      ++rep.contact_ticks;
      first_contact = std::min(first_contact, i);
    }
  }
  rep.mean_factor /= static_cast<double>(trace.size());

  const auto positions = leader_positions(trace, trace.size());
  rep.high_freq_energy_ratio = high_freq_energy_ratio(std::span<const Vec3>(positions), dt, config.f_cutoff);
  rep.max_local_jerk = max_local_jerk(std::span<const Vec3>(positions), config.jerk_window_ticks);
  const std::span<const Vec3> baseline(positions.data(), first_contact);
  rep.jerk_anomaly = jerk_anomaly_pct(positions, baseline);
  rep.feedback_correlation = feedback_correlation(rendered, truth, mask);
  return rep;
}

std::string report_json(const StabilityReport& r) {
  nlohmann::json j{{"scenario", r.scenario},
                   {"transform", std::string(to_string(r.transform))},
                   {"ticks", r.ticks},
                   {"contact_ticks", r.contact_ticks},
                   {"mean_factor", r.mean_factor},
                   {"high_freq_energy_ratio", r.high_freq_energy_ratio},
                   {"max_local_jerk", r.max_local_jerk},
                   {"jerk_anomaly_pct", r.jerk_anomaly.percent},
                   {"jerk_threshold", r.jerk_anomaly.threshold},
                   {"jerk_baseline_degenerate", r.jerk_anomaly.degenerate_baseline},
                   {"feedback_correlation", number_or_null(r.feedback_correlation.r, r.feedback_correlation.defined)},
                   {"correlation_samples", r.feedback_correlation.samples}};
  return j.dump();
}

}  // namespace teleop
