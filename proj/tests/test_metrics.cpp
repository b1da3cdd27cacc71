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

#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "oracles/oracles.hpp"
#include "teleop/metrics.hpp"

using namespace teleop;
using std::numbers::pi;

namespace {

constexpr double kDt = 1.0 / 200.0;
constexpr double kCut = 5.0;

std::vector<double> tones(std::size_t n, std::initializer_list<double> freqs) {
  std::vector<double> s(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (double f : freqs) s[i] += std::sin(2 * pi * f * static_cast<double>(i) * kDt + 0.3);
  }
  return s;
}

std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

}  // namespace

TEST_CASE("high-frequency energy ratio") {
  CHECK(high_freq_energy_ratio(tones(1024, {kCut / 4}), kDt, kCut) < 0.01);
  CHECK(high_freq_energy_ratio(tones(1024, {2 * kCut}), kDt, kCut) > 0.99);
  const double two = high_freq_energy_ratio(tones(1024, {kCut / 4, 2 * kCut}), kDt, kCut);
  CHECK(std::abs(two - 0.5) <= 0.02);
  CHECK(high_freq_energy_ratio(std::vector<double>(64, 3.0), kDt, kCut) == 0.0);

  const auto n = gaussian(512, 1);
  const double r = high_freq_energy_ratio(n, kDt, kCut);
  CHECK(r >= 0.0);
  CHECK(r <= 1.0);
  std::vector<double> scaled(n);
  for (std::size_t i = 0; i < n.size(); ++i) scaled[i] = -7.5 * n[i];
  CHECK(high_freq_energy_ratio(scaled, kDt, kCut) == doctest::Approx(r).epsilon(1e-12));

  CHECK_THROWS_AS(high_freq_energy_ratio(std::vector<double>(15, 1.0), kDt, kCut), std::invalid_argument);
  CHECK_THROWS_AS(high_freq_energy_ratio(n, kDt, 100.0), std::invalid_argument);
}

TEST_CASE("vector ratio weights axes by energy") {
  const auto lo = tones(1024, {kCut / 4});
  const auto hi = tones(1024, {2 * kCut});
  std::vector<Vec3> v(1024);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = Vec3(lo[i], hi[i], 0.0);
  CHECK(std::abs(high_freq_energy_ratio(std::span<const Vec3>(v), kDt, kCut) - 0.5) <= 0.02);
}

TEST_CASE("third difference") {
  std::vector<double> cubic(50), ramp(50), flat(50, 2.0);
  for (std::size_t i = 0; i < cubic.size(); ++i) {
    const double t = static_cast<double>(i) * kDt;
    cubic[i] = t * t * t;
    ramp[i] = 3.0 * t - 1.0;
  }
  for (double j : jerk_series(cubic)) REQUIRE(std::abs(j - 6 * kDt * kDt * kDt) <= 1e-12);
  CHECK(max_local_jerk(ramp, 10) <= 1e-12);
  CHECK(max_local_jerk(flat, 10) == 0.0);
  CHECK(jerk_series(cubic).size() == cubic.size() - 3);
  CHECK_THROWS_AS(jerk_series(std::vector<double>(3, 0.0)), std::invalid_argument);

  const auto n = gaussian(300, 2);
  std::vector<double> k(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) k[i] = -2.5 * n[i];
  CHECK(max_local_jerk(k, 20) == doctest::Approx(2.5 * max_local_jerk(n, 20)).epsilon(1e-14));
}

TEST_CASE("jerk anomaly on a Gaussian baseline follows the folded-normal tail") {
  std::vector<double> jerk = gaussian(200000, 3);
  for (auto& j : jerk) j = std::abs(j);
  const auto a = jerk_anomaly_from_jerk(jerk, jerk);
  CHECK_FALSE(a.degenerate_baseline);
  CHECK(std::abs(a.percent - 100.0 * oracle::folded_normal_three_sigma_tail()) < 0.06);
}

TEST_CASE("jerk anomaly counts") {
  std::vector<double> baseline = gaussian(1000, 4);
  for (auto& j : baseline) j = std::abs(j);
  std::vector<double> evaluated(1000, 0.5);
  CHECK(jerk_anomaly_from_jerk(evaluated, baseline).percent == 0.0);
  const double thr = jerk_anomaly_from_jerk(evaluated, baseline).threshold;
  evaluated[500] = thr * 10.0;
  CHECK(jerk_anomaly_from_jerk(evaluated, baseline).percent == doctest::Approx(0.1));

  std::vector<Vec3> flat(100, Vec3(1, 2, 3));
  std::vector<Vec3> wiggly(100);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (auto& p : wiggly) p = Vec3(g(rng), g(rng), g(rng));
  CHECK(jerk_anomaly_pct(flat, wiggly).percent == 0.0);

  const auto degenerate = jerk_anomaly_pct(wiggly, flat);
  CHECK(degenerate.degenerate_baseline);
  CHECK(degenerate.percent > 90.0);

  CHECK_THROWS_AS(jerk_anomaly_from_jerk(evaluated, std::vector<double>(31, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(jerk_anomaly_from_jerk(std::vector<double>{}, baseline), std::invalid_argument);
}

TEST_CASE("feedback correlation") {
  const auto a = gaussian(10000, 6);
  const auto b = gaussian(10000, 7);
  const std::vector<bool> all(a.size(), true);
  std::vector<double> neg(a.size()), affine(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    neg[i] = -a[i];
    affine[i] = 3.0 * a[i] + 11.0;
  }
  CHECK(feedback_correlation(a, a, all).r == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(feedback_correlation(a, neg, all).r == doctest::Approx(-1.0).epsilon(1e-12));
  const auto indep = feedback_correlation(a, b, all);
  CHECK(indep.defined);
  CHECK(std::abs(indep.r) < 0.05);
  CHECK(indep.r == doctest::Approx(oracle::pearson(a, b)).epsilon(1e-10));
  CHECK(feedback_correlation(affine, b, all).r == doctest::Approx(indep.r).epsilon(1e-10));

  std::vector<bool> half(a.size(), false);
  for (std::size_t i = 0; i < half.size(); i += 2) half[i] = true;
  const auto masked = feedback_correlation(a, b, half);
  CHECK(masked.samples == 5000);

  const std::vector<double> flat(a.size(), 1.0);
  CHECK_FALSE(feedback_correlation(a, flat, all).defined);
  CHECK_FALSE(feedback_correlation(a, b, std::vector<bool>(a.size(), false)).defined);
}

TEST_CASE("stability report on a contact-free trace") {
  const auto t = run_teleop_loop(fixtures::scenario("free_sweep"));
  const auto r = compute_stability_report(t, "free_sweep", VelocityTransform::Squared);
  CHECK_FALSE(r.feedback_correlation.defined);
  CHECK(r.contact_ticks == 0);
  CHECK(std::isfinite(r.high_freq_energy_ratio));
  CHECK(std::isfinite(r.max_local_jerk));
  CHECK(std::isfinite(r.jerk_anomaly.percent));
  CHECK(std::isfinite(r.mean_factor));
  CHECK(report_json(r).find("\"feedback_correlation\":null") != std::string::npos);
  CHECK(compute_stability_report(t, "free_sweep", VelocityTransform::Squared) == r);
}
