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
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sbdetect/classes.hpp"

namespace sbd {

// The eleven synthetic generators. Each maps to exactly one BiasClass.
enum class ScenarioId : int {
  kUniform = 0,
  kCenterGaussian,
  kCenterCauchy,
  kBoundsBeta,
  kBoundsOneSided,
  kClustersBoxes,
  kClustersGaussian,
  kGapsSingle,
  kGapsMultiple,
  kGridExact,
  kGridJittered,
};

inline constexpr std::size_t kNumScenarios = 11;

std::string_view scenario_name(ScenarioId id);
ScenarioId parse_scenario(std::string_view name);
BiasClass scenario_class(ScenarioId id);
std::vector<ScenarioId> all_scenarios();

struct ParamSchema {
  std::string name;
  double min;
  double max;
  bool min_inclusive;
  bool max_inclusive;
  bool integer;
};

const std::vector<ParamSchema>& param_schema(ScenarioId id);

// Sample sizes the classifier is trained for.
inline constexpr std::size_t kModelSampleSizes[] = {30, 50, 100, 600};
bool is_model_sample_size(std::size_t n);

struct ScenarioSpec {
  ScenarioId id = ScenarioId::kUniform;
  std::map<std::string, double> params;
  std::size_t sample_size = 600;

  BiasClass class_label() const { return scenario_class(id); }
  double param(const std::string& name) const;
  // Checks parameter names, ranges, integrality, and cross-parameter
  // constraints. Throws Error(kValidation).
  void validate() const;
  // Human-readable identity, e.g. "bounds_beta(a=0.1)".
  std::string key() const;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

// ---- Individual generators ----------------------------------------------
// All are pure functions of their arguments. Values always lie in [0, 1].

std::vector<double> sample_uniform(std::size_t n, std::uint64_t seed);
// Gaussian at 0.5 truncated to [0,1] by rejection.
std::vector<double> sample_center(std::size_t n, double sigma, std::uint64_t seed);
// Cauchy at 0.5 truncated to [0,1] by rejection.
std::vector<double> sample_center_cauchy(std::size_t n, double scale, std::uint64_t seed);
// Beta(a, a), a in (0,1): U-shaped.
std::vector<double> sample_bounds(std::size_t n, double a, std::uint64_t seed);
// Beta(a, b) with a < 1 <= b; mirrored to the upper bound when `upper`.
std::vector<double> sample_bounds_one_sided(std::size_t n, double a, double b, bool upper,
                                            std::uint64_t seed);
// k uniform boxes of the given width.
std::vector<double> sample_clusters(std::size_t n, int k, double width, std::uint64_t seed);
// k truncated Gaussian clusters with uniformly placed centres.
std::vector<double> sample_gaussian_clusters(std::size_t n, int k, double sigma,
                                             std::uint64_t seed);
// Uniform on [0,1] minus g disjoint random intervals of width gap_width.
std::vector<double> sample_gaps(std::size_t n, int g, double gap_width, std::uint64_t seed);
// Uniform snapped to (2i-1)/(2 levels), then jittered by U(-jitter, jitter).
std::vector<double> sample_discretized(std::size_t n, int levels, double jitter,
                                       std::uint64_t seed);

std::vector<double> generate(const ScenarioSpec& spec, std::uint64_t seed);
std::vector<double> generate(const ScenarioSpec& spec, std::uint64_t seed, std::size_t n);

// ---- Portfolio -----------------------------------------------------------

inline constexpr std::string_view kPortfolioVersion = "sb-portfolio-1";
inline constexpr int kPortfolioSchemaVersion = 1;

// Every parameter setting considered before pruning.
std::vector<ScenarioSpec> candidate_grid();

struct PruneOptions {
  std::size_t sample_size = 600;
  int seeds = 100;
  double alpha = 0.01;
  double min_rejection_rate = 0.20;
};

// Fraction of seeds for which the KS test rejects uniformity.
double ks_rejection_rate(const ScenarioSpec& spec, const PruneOptions& options);

// Drops non-uniform settings that are statistically indistinguishable from
// uniform too often. The uniform scenario is always kept.
std::vector<ScenarioSpec> prune_near_uniform(const std::vector<ScenarioSpec>& candidates,
                                             const PruneOptions& options = {});

// The versioned portfolio: candidate_grid() after pruning. Computed once.
const std::vector<ScenarioSpec>& enumerate_portfolio();

nlohmann::json to_json(const ScenarioSpec& spec);
ScenarioSpec spec_from_json(const nlohmann::json& j);

// One JSON record per line; every record carries the schema version.
std::string export_portfolio(const std::vector<ScenarioSpec>& specs);
std::vector<ScenarioSpec> import_portfolio(std::string_view text);

}  // namespace sbd
