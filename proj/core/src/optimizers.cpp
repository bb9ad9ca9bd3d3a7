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

#include "sbdetect/optimizers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "sbdetect/error.hpp"
#include "sbdetect/parallel.hpp"

namespace sbd {
namespace {

using Point = std::vector<double>;

struct Tracker {
  double best_value = std::numeric_limits<double>::infinity();
  Point best;

  void offer(const Point& x, double value) {
    if (value < best_value) {
      best_value = value;
      best = x;
    }
  }
};

Point random_point(std::size_t n, Rng& rng) {
  Point x(n);
  for (double& v : x) v = rng.uniform();
  return x;
}

Point random_search(const RunBudget& b, Rng& rng, F0Function& f) {
  Tracker t;
  for (std::size_t e = 0; e < b.max_evaluations; ++e) {
    Point x = random_point(b.dimension, rng);
    t.offer(x, f(x));
  }
  return t.best;
}

Point differential_evolution(const OptimizerConfig& c, const RunBudget& b, Rng& rng,
                             F0Function& f) {
  const std::size_t np = static_cast<std::size_t>(c.population_size);
  const std::size_t n = b.dimension;
  std::vector<Point> pop(np);
  std::vector<double> fit(np);
  Tracker t;
  for (std::size_t i = 0; i < np; ++i) {
    pop[i] = random_point(n, rng);
    fit[i] = f(pop[i]);
    t.offer(pop[i], fit[i]);
  }
  Point trial(n);
  while (f.evaluations() < b.max_evaluations) {
    const std::size_t best = static_cast<std::size_t>(
        std::min_element(fit.begin(), fit.end()) - fit.begin());
    for (std::size_t i = 0; i < np && f.evaluations() < b.max_evaluations; ++i) {
      std::size_t r[3];
      for (int k = 0; k < 3; ++k) {
        std::size_t cand;
        do {
          cand = rng.index(np);
        } while (cand == i || (k > 0 && cand == r[0]) || (k > 1 && cand == r[1]));
        r[k] = cand;
      }
      const Point& base = c.strategy == DeStrategy::kBest1Bin ? pop[best] : pop[r[2]];
      const std::size_t jrand = rng.index(n);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == jrand || rng.uniform() < c.CR)
          trial[j] = base[j] + c.F * (pop[r[0]][j] - pop[r[1]][j]);
        else
          trial[j] = pop[i][j];
      }
      apply_correction(c.correction, trial, rng);
      const double v = f(trial);
      t.offer(trial, v);
      if (v <= fit[i]) {
        pop[i] = trial;
        fit[i] = v;
      }
    }
  }
  return t.best;
}

// (1+1)-ES with the one-fifth success rule applied per step:
// sigma *= exp(1/3) on success and exp(-1/12) on failure.
Point one_plus_one_es(const OptimizerConfig& c, const RunBudget& b, Rng& rng, F0Function& f) {
  Point x = random_point(b.dimension, rng);
  double fx = f(x);
  Tracker t;
  t.offer(x, fx);
  double sigma = c.initial_step;
  const double up = std::exp(1.0 / 3.0);
  const double down = std::exp(-1.0 / 12.0);
  Point y(b.dimension);
  while (f.evaluations() < b.max_evaluations) {
    for (std::size_t j = 0; j < y.size(); ++j) y[j] = x[j] + sigma * rng.normal(0.0, 1.0);
    apply_correction(c.correction, y, rng);
    const double fy = f(y);
    t.offer(y, fy);
    if (fy <= fx) {
      x = y;
      fx = fy;
      sigma *= up;
    } else {
      sigma *= down;
    }
    sigma = std::clamp(sigma, c.min_step, c.max_step);
  }
  return t.best;
}

// Solis-Wets style adaptive random search: try x + dev and x - dev around a
// drifting bias vector, grow the step after repeated successes, shrink it
// after repeated failures, restart from a random point once it collapses.
Point local_search(const OptimizerConfig& c, const RunBudget& b, Rng& rng, F0Function& f) {
  const std::size_t n = b.dimension;
  Point x = random_point(n, rng);
  double fx = f(x);
  Tracker t;
  t.offer(x, fx);
  double rho = c.initial_step;
  Point bias(n, 0.0), dev(n), y(n);
  int successes = 0, failures = 0;
  while (f.evaluations() < b.max_evaluations) {
    for (std::size_t j = 0; j < n; ++j) dev[j] = rng.normal(bias[j], rho);
    for (std::size_t j = 0; j < n; ++j) y[j] = x[j] + dev[j];
    apply_correction(c.correction, y, rng);
    double fy = f(y);
    t.offer(y, fy);
    bool improved = fy < fx;
    if (improved) {
      for (std::size_t j = 0; j < n; ++j) bias[j] = 0.2 * bias[j] + 0.4 * dev[j];
    } else if (f.evaluations() < b.max_evaluations) {
      for (std::size_t j = 0; j < n; ++j) y[j] = x[j] - dev[j];
      apply_correction(c.correction, y, rng);
      fy = f(y);
      t.offer(y, fy);
      improved = fy < fx;
      if (improved)
        for (std::size_t j = 0; j < n; ++j) bias[j] -= 0.4 * dev[j];
      else
        for (double& v : bias) v *= 0.5;
    }
    if (improved) {
      x = y;
      fx = fy;
      ++successes;
      failures = 0;
    } else {
      ++failures;
      successes = 0;
    }
    if (successes >= c.expand_after) {
      rho = std::min(rho * 2.0, c.max_step);
      successes = 0;
    } else if (failures >= c.contract_after) {
      rho *= 0.5;
      failures = 0;
    }
    if (rho < c.min_step && f.evaluations() < b.max_evaluations) {
      x = random_point(n, rng);
      fx = f(x);
      t.offer(x, fx);
      rho = c.initial_step;
      std::fill(bias.begin(), bias.end(), 0.0);
    }
  }
  return t.best;
}

constexpr std::array<std::string_view, 4> kAlgorithmNames = {"RandomSearch", "DE", "OnePlusOneES",
                                                            "LocalSearch"};
constexpr std::array<std::string_view, 2> kStrategyNames = {"best/1/bin", "rand/1/bin"};

template <typename E, std::size_t N>
E parse_enum(const std::array<std::string_view, N>& names, std::string_view s, const char* what) {
  for (std::size_t i = 0; i < N; ++i)
    if (names[i] == s) return static_cast<E>(i);
  fail(ErrorCategory::kValidation, std::string("unknown ") + what + " '" + std::string(s) + "'");
}

}  // namespace

std::string_view algorithm_name(Algorithm a) { return kAlgorithmNames[static_cast<std::size_t>(a)]; }
std::string_view strategy_name(DeStrategy s) { return kStrategyNames[static_cast<std::size_t>(s)]; }

std::string OptimizerConfig::id() const {
  switch (algorithm) {
    case Algorithm::kRandomSearch: return "RandomSearch";
    case Algorithm::kDE:
      return "DE-" + std::string(strategy_name(strategy)) + "-p" + std::to_string(population_size) +
             "-" + std::string(correction_name(correction));
    case Algorithm::kOnePlusOneES: return "ES-1+1-" + std::string(correction_name(correction));
    case Algorithm::kLocalSearch: return "LS-adaptive-" + std::string(correction_name(correction));
  }
  return "unknown";
}

void OptimizerConfig::validate() const {
  if (algorithm == Algorithm::kDE) {
    require(population_size >= 4, "DE population_size must be >= 4");
    require(F > 0.0 && F <= 2.0, "DE F must lie in (0, 2]");
    require(CR >= 0.0 && CR <= 1.0, "DE CR must lie in [0, 1]");
  }
  if (algorithm == Algorithm::kOnePlusOneES || algorithm == Algorithm::kLocalSearch) {
    require(min_step > 0.0 && min_step <= initial_step && initial_step <= max_step,
            "step sizes must satisfy 0 < min_step <= initial_step <= max_step");
    require(expand_after >= 1 && contract_after >= 1, "expand_after/contract_after must be >= 1");
  }
}

nlohmann::json to_json(const OptimizerConfig& c) {
  nlohmann::json j = {{"id", c.id()},
                      {"algorithm", algorithm_name(c.algorithm)},
                      {"correction", correction_name(c.correction)}};
  if (c.algorithm == Algorithm::kDE) {
    j["population_size"] = c.population_size;
    j["F"] = c.F;
    j["CR"] = c.CR;
    j["strategy"] = strategy_name(c.strategy);
  }
  if (c.algorithm == Algorithm::kOnePlusOneES || c.algorithm == Algorithm::kLocalSearch) {
    j["initial_step"] = c.initial_step;
    j["min_step"] = c.min_step;
    j["max_step"] = c.max_step;
  }
  if (c.algorithm == Algorithm::kLocalSearch) {
    j["expand_after"] = c.expand_after;
    j["contract_after"] = c.contract_after;
  }
  return j;
}

OptimizerConfig optimizer_config_from_json(const nlohmann::json& j) {
  try {
    OptimizerConfig c;
    c.algorithm = parse_enum<Algorithm>(kAlgorithmNames, j.at("algorithm").get<std::string>(), "algorithm");
    c.correction = parse_correction(j.at("correction").get<std::string>());
    c.population_size = j.value("population_size", c.population_size);
    c.F = j.value("F", c.F);
    c.CR = j.value("CR", c.CR);
    if (j.contains("strategy"))
      c.strategy = parse_enum<DeStrategy>(kStrategyNames, j["strategy"].get<std::string>(), "DE strategy");
    c.initial_step = j.value("initial_step", c.initial_step);
    c.min_step = j.value("min_step", c.min_step);
    c.max_step = j.value("max_step", c.max_step);
    c.expand_after = j.value("expand_after", c.expand_after);
    c.contract_after = j.value("contract_after", c.contract_after);
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCategory::kParse, std::string("optimizer config: ") + e.what());
  }
}

RunBudget RunBudget::desk(std::size_t dimension, std::size_t runs, std::uint64_t master_seed) {
  return RunBudget{dimension, 1000 * dimension, runs, master_seed};
}

RunBudget RunBudget::full(std::size_t dimension, std::size_t runs, std::uint64_t master_seed) {
  return RunBudget{dimension, 10000 * dimension, runs, master_seed};
}

void RunBudget::validate(const OptimizerConfig& config) const {
  require(dimension >= 1, "budget dimension must be >= 1");
  require(runs >= kMinRuns, "budget runs must be >= " + std::to_string(kMinRuns));
  const std::size_t floor =
      config.algorithm == Algorithm::kDE ? static_cast<std::size_t>(config.population_size) : 1;
  require(max_evaluations >= floor, "max_evaluations must be >= the population size");
}

std::uint64_t RunBudget::run_seed(std::size_t run) const { return derive_seed(master_seed, {run}); }

nlohmann::json to_json(const RunBudget& b) {
  return {{"dimension", b.dimension},
          {"max_evaluations", b.max_evaluations},
          {"runs", b.runs},
          {"master_seed", b.master_seed},
          {"f0_mode", b.f0_mode == F0Function::Mode::kFresh ? "fresh" : "hashed"}};
}

std::vector<double> run_optimizer(const OptimizerConfig& config, const RunBudget& budget,
                                  std::uint64_t run_seed) {
  config.validate();
  require(budget.dimension >= 1, "budget dimension must be >= 1");
  Rng rng(derive_seed(run_seed, {1}));
  F0Function f(derive_seed(run_seed, {2}), budget.f0_mode);
  switch (config.algorithm) {
    case Algorithm::kRandomSearch: return random_search(budget, rng, f);
    case Algorithm::kDE: return differential_evolution(config, budget, rng, f);
    case Algorithm::kOnePlusOneES: return one_plus_one_es(config, budget, rng, f);
    case Algorithm::kLocalSearch: return local_search(config, budget, rng, f);
  }
  fail(ErrorCategory::kValidation, "unknown algorithm");
}

PositionMatrix collect(const OptimizerConfig& config, const RunBudget& budget) {
  config.validate();
  budget.validate(config);
  Eigen::MatrixXd data(static_cast<Eigen::Index>(budget.runs),
                       static_cast<Eigen::Index>(budget.dimension));
  std::vector<std::uint64_t> seeds(budget.runs);
  for (std::size_t r = 0; r < budget.runs; ++r) seeds[r] = budget.run_seed(r);
  parallel_for(budget.runs, [&](std::size_t r) {
    const auto x = run_optimizer(config, budget, seeds[r]);
    for (std::size_t j = 0; j < x.size(); ++j)
      data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = x[j];
  });
  nlohmann::json prov = {{"source", "collect"},
                         {"optimizer", to_json(config)},
                         {"budget", to_json(budget)},
                         {"run_seeds", seeds}};
  return PositionMatrix(std::move(data), std::move(prov));
}

const std::vector<OptimizerConfig>& reference_portfolio() {
  static const std::vector<OptimizerConfig> portfolio = [] {
    std::vector<OptimizerConfig> out;
    out.push_back(OptimizerConfig{});
    for (auto s : {DeStrategy::kBest1Bin, DeStrategy::kRand1Bin}) {
      for (auto c : {BoundaryCorrection::kSaturate, BoundaryCorrection::kToroidal,
                     BoundaryCorrection::kMirror, BoundaryCorrection::kResample}) {
        OptimizerConfig de;
        de.algorithm = Algorithm::kDE;
        de.strategy = s;
        de.correction = c;
        out.push_back(de);
      }
    }
    OptimizerConfig es;
    es.algorithm = Algorithm::kOnePlusOneES;
    out.push_back(es);
    OptimizerConfig ls;
    ls.algorithm = Algorithm::kLocalSearch;
    out.push_back(ls);
    return out;
  }();
  return portfolio;
}

const OptimizerConfig& find_optimizer(std::string_view id) {
  std::string valid;
  for (const auto& c : reference_portfolio()) {
    if (c.id() == id) return c;
    valid += (valid.empty() ? "" : ", ") + c.id();
  }
  fail(ErrorCategory::kValidation, "unknown optimizer '" + std::string(id) + "' (valid: " + valid + ")");
}

}  // namespace sbd
