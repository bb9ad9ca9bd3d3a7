// Copyright 2026 The sbdetect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <algorithm>
#include <vector>

#include <benchmark/benchmark.h>

#include "sbdetect/classes.hpp"
#include "sbdetect/network.hpp"
#include "sbdetect/optimizers.hpp"
#include "sbdetect/position_matrix.hpp"
#include "sbdetect/rng.hpp"
#include "sbdetect/scenario.hpp"
#include "sbdetect/stat_tests.hpp"

namespace {

std::vector<double> sorted_uniform(std::size_t n, std::uint64_t seed) {
  auto x = sbd::sample_uniform(n, seed);
  std::sort(x.begin(), x.end());
  return x;
}

void BM_StatTest(benchmark::State& state, sbd::TestKind kind) {
  const auto x = sorted_uniform(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(sbd::run_test(kind, x));
}
BENCHMARK_CAPTURE(BM_StatTest, ks, sbd::TestKind::kKS)->Arg(30)->Arg(100)->Arg(600);
BENCHMARK_CAPTURE(BM_StatTest, ad, sbd::TestKind::kAD)->Arg(30)->Arg(100)->Arg(600);
BENCHMARK_CAPTURE(BM_StatTest, cvm, sbd::TestKind::kCvM)->Arg(30)->Arg(100)->Arg(600);

void BM_DetectStatistical(benchmark::State& state) {
  std::vector<std::vector<double>> cols;
  for (std::uint64_t j = 0; j < 30; ++j) cols.push_back(sbd::sample_uniform(100, sbd::derive_seed(2, {j})));
  const auto m = sbd::from_columns(cols);
  for (auto _ : state) benchmark::DoNotOptimize(sbd::detect_bias_statistical(m));
}
BENCHMARK(BM_DetectStatistical);

void BM_Forward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto net = sbd::Network::initialize(sbd::NetworkConfig::for_sample_size(n), 3);
  const auto x = sbd::preprocess(sbd::sample_uniform(n, 4), n);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x));
}
BENCHMARK(BM_Forward)->Arg(30)->Arg(100)->Arg(600);

void BM_TrainStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto net = sbd::Network::initialize(sbd::NetworkConfig::for_sample_size(n), 5);
  Eigen::MatrixXd inputs(static_cast<Eigen::Index>(n), 64);
  std::vector<int> labels(64);
  for (int b = 0; b < 64; ++b) {
    const auto x = sbd::preprocess(sbd::sample_uniform(n, sbd::derive_seed(6, {static_cast<std::uint64_t>(b)})), n);
    for (std::size_t i = 0; i < n; ++i) inputs(static_cast<Eigen::Index>(i), b) = x[i];
    labels[b] = b % static_cast<int>(sbd::kNumClasses);
  }
  sbd::Workspace ws;
  std::vector<double> grad;
  for (auto _ : state) benchmark::DoNotOptimize(net.loss_and_gradient(inputs, labels, grad, ws));
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_TrainStep)->Arg(30)->Arg(100)->Arg(600)->Unit(benchmark::kMillisecond);

void BM_OptimizerRun(benchmark::State& state, sbd::Algorithm algorithm) {
  sbd::OptimizerConfig config;
  config.algorithm = algorithm;
  const auto budget = sbd::RunBudget::desk(30, 30, 7);
  std::uint64_t run = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sbd::run_optimizer(config, budget, budget.run_seed(run++)));
}
BENCHMARK_CAPTURE(BM_OptimizerRun, random_search, sbd::Algorithm::kRandomSearch)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_OptimizerRun, de, sbd::Algorithm::kDE)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_OptimizerRun, es, sbd::Algorithm::kOnePlusOneES)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_OptimizerRun, local_search, sbd::Algorithm::kLocalSearch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
