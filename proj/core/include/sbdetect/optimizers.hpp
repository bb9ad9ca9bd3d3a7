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

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sbdetect/f0.hpp"
#include "sbdetect/position_matrix.hpp"

namespace sbd {

enum class Algorithm { kRandomSearch, kDE, kOnePlusOneES, kLocalSearch };
enum class DeStrategy { kBest1Bin, kRand1Bin };

std::string_view algorithm_name(Algorithm a);
std::string_view strategy_name(DeStrategy s);

struct OptimizerConfig {
  Algorithm algorithm = Algorithm::kRandomSearch;
  // Differential evolution.
  int population_size = 20;
  double F = 0.5;
  double CR = 0.9;
  DeStrategy strategy = DeStrategy::kBest1Bin;
  BoundaryCorrection correction = BoundaryCorrection::kSaturate;
  // Single-solution methods: initial step (standard deviation of the
  // Gaussian perturbation) and its bounds.
  double initial_step = 0.1;
  double min_step = 1e-6;
  double max_step = 1.0;
  // Local search: consecutive successes / failures before the step is
  // expanded / contracted.
  int expand_after = 5;
  int contract_after = 3;

  // Stable identifier such as "DE-best/1/bin-p20-saturate".
  std::string id() const;
  void validate() const;
};

nlohmann::json to_json(const OptimizerConfig& c);
OptimizerConfig optimizer_config_from_json(const nlohmann::json& j);

struct RunBudget {
  std::size_t dimension = 30;
  std::size_t max_evaluations = 30000;
  std::size_t runs = 100;
  std::uint64_t master_seed = 0;
  F0Function::Mode f0_mode = F0Function::Mode::kFresh;

  // 1000 * n evaluations.
  static RunBudget desk(std::size_t dimension, std::size_t runs, std::uint64_t master_seed);
  // 10000 * n evaluations.
  static RunBudget full(std::size_t dimension, std::size_t runs, std::uint64_t master_seed);

  void validate(const OptimizerConfig& config) const;
  // Seed of run i; independent of the optimizer so that configurations can
  // be compared under identical seeds.
  std::uint64_t run_seed(std::size_t run) const;
};

nlohmann::json to_json(const RunBudget& b);

inline constexpr std::size_t kMinRuns = 30;

// Runs the configured algorithm on f0 until the evaluation budget is spent
// and returns the best position seen. Uses one stream for the optimizer and
// an independent one for f0, both derived from run_seed.
std::vector<double> run_optimizer(const OptimizerConfig& config, const RunBudget& budget,
                                  std::uint64_t run_seed);

// budget.runs independent runs; row i holds run i's final best position.
// Provenance records the config, the budget and every run seed.
PositionMatrix collect(const OptimizerConfig& config, const RunBudget& budget);

inline constexpr std::string_view kOptimizerPortfolioVersion = "sb-optimizers-1";

// RandomSearch; DE best/1/bin and rand/1/bin crossed with the four
// corrections; (1+1)-ES; adaptive-step local search.
const std::vector<OptimizerConfig>& reference_portfolio();

// Looks up a portfolio entry by id(). Throws with the list of valid ids.
const OptimizerConfig& find_optimizer(std::string_view id);

}  // namespace sbd
