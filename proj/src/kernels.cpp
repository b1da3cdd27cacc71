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

#include "teleop/kernels.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace teleop {

namespace {

struct Dft {
  std::vector<double> x;  // mean removed
  std::vector<double> cos_table;
  std::vector<double> sin_table;
};

Dft prepare(std::span<const double> signal) {
  const std::size_t n = signal.size();
  if (n < 2) throw std::invalid_argument("power_spectrum: need at least 2 samples");
  Dft d;
  const double mean = std::accumulate(signal.begin(), signal.end(), 0.0) / static_cast<double>(n);
  d.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) d.x[i] = signal[i] - mean;
  d.cos_table.resize(n);
  d.sin_table.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
    d.cos_table[m] = std::cos(a);
    d.sin_table[m] = std::sin(a);
  }
  return d;
}

double bin_power(const Dft& d, std::size_t k) {
  const std::size_t n = d.x.size();
  double re = 0.0;
  double im = 0.0;
  std::size_t m = 0;  // k * i mod n
  for (std::size_t i = 0; i < n; ++i) {
    re += d.x[i] * d.cos_table[m];
    im -= d.x[i] * d.sin_table[m];
    m += k;
    if (m >= n) m -= n;
  }
  return re * re + im * im;
}

}  // namespace

std::vector<double> power_spectrum_serial(std::span<const double> signal) {
  const Dft d = prepare(signal);
  const std::size_t bins = signal.size() / 2;
  std::vector<double> out(bins);
  for (std::size_t k = 1; k <= bins; ++k) out[k - 1] = bin_power(d, k);
  return out;
}

std::vector<double> power_spectrum_parallel(std::span<const double> signal) {
  const Dft d = prepare(signal);
  const auto bins = static_cast<std::ptrdiff_t>(signal.size() / 2);
  std::vector<double> out(static_cast<std::size_t>(bins));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 1; k <= bins; ++k) out[static_cast<std::size_t>(k - 1)] = bin_power(d, static_cast<std::size_t>(k));
  return out;
}

std::vector<IkResult> batch_ik_serial(const KinematicChain& chain, std::span<const IkJob> jobs,
                                      const IkTaskWeights& weights, const IkParams& params) {
  std::vector<IkResult> out;
  out.reserve(jobs.size());
  for (const auto& job : jobs) out.push_back(solve_ik(chain, job.target, job.seed, weights, params));
  return out;
}

std::vector<IkResult> batch_ik_parallel(const KinematicChain& chain, std::span<const IkJob> jobs,
                                        const IkTaskWeights& weights, const IkParams& params) {
  validate_ik_settings(weights, params);
  if (weights.w_elbow > 0.0 && params.elbow_joint_index >= chain.dof()) {
    throw std::out_of_range("batch_ik: elbow_joint_index out of range");
  }
  for (const auto& job : jobs) {
    if (static_cast<std::size_t>(job.seed.size()) != chain.dof() || !chain.within_limits(job.seed)) {
      throw std::invalid_argument("batch_ik: seed has wrong size or is outside joint limits");
    }
  }
  std::vector<IkResult> out(jobs.size());
  const auto n = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& job = jobs[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = solve_ik(chain, job.target, job.seed, weights, params);
  }
  return out;
}

}  // namespace teleop
