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


// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "teleop/arm_model.hpp"
#include "teleop/kernels.hpp"

using namespace teleop;

namespace {

std::vector<double> noise(std::size_t n) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

const KinematicChain& follower() {
  static const KinematicChain c = load_chain(std::string(TELEOP_BENCH_CONFIG_DIR) + "/chains/follower7.chain");
  return c;
}

std::vector<IkJob> ik_jobs(std::size_t n) {
  const auto& c = follower();
  std::mt19937_64 rng(8);
  std::vector<IkJob> jobs(n);
  for (auto& job : jobs) {
    VecX q(c.dof());
    for (std::size_t j = 0; j < c.dof(); ++j) {
      const auto& lim = c.joints[j].limits;
      q[static_cast<Eigen::Index>(j)] = std::uniform_real_distribution<double>(lim.min, lim.max)(rng);
    }
    job.target = forward_kinematics(c, q);
    job.seed = c.clamp_to_limits(q + VecX::Constant(q.size(), 0.2));
  }
  return jobs;
}

template <auto Kernel>
void spectrum(benchmark::State& state) {
  const auto signal = noise(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(signal));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void batch_ik(benchmark::State& state) {
  const auto jobs = ik_jobs(static_cast<std::size_t>(state.range(0)));
  IkParams params;
  params.max_iterations = 200;
  const IkTaskWeights weights{1.0, 0.5, 0.001, 0.01};
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(follower(), jobs, weights, params));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(spectrum<power_spectrum_serial>)->Name("spectrum/serial")->Arg(512)->Arg(2000)->Arg(8192);
BENCHMARK(spectrum<power_spectrum_parallel>)->Name("spectrum/parallel")->Arg(512)->Arg(2000)->Arg(8192);
BENCHMARK(batch_ik<batch_ik_serial>)->Name("batch_ik/serial")->Arg(64)->Arg(512);
BENCHMARK(batch_ik<batch_ik_parallel>)->Name("batch_ik/parallel")->Arg(64)->Arg(512);

BENCHMARK_MAIN();
