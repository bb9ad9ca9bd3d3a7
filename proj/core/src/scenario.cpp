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

#include "sbdetect/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "sbdetect/error.hpp"
#include "sbdetect/rng.hpp"
#include "sbdetect/stat_tests.hpp"

namespace sbd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ScenarioInfo {
  ScenarioId id;
  std::string_view name;
  BiasClass label;
};

constexpr ScenarioInfo kScenarioTable[] = {
    {ScenarioId::kUniform, "uniform", BiasClass::kUniform},
    {ScenarioId::kCenterGaussian, "center_gaussian", BiasClass::kCenter},
    {ScenarioId::kCenterCauchy, "center_cauchy", BiasClass::kCenter},
    {ScenarioId::kBoundsBeta, "bounds_beta", BiasClass::kBounds},
    {ScenarioId::kBoundsOneSided, "bounds_one_sided", BiasClass::kBounds},
    {ScenarioId::kClustersBoxes, "clusters_boxes", BiasClass::kGapsClusters},
    {ScenarioId::kClustersGaussian, "clusters_gaussian", BiasClass::kGapsClusters},
    {ScenarioId::kGapsSingle, "gaps_single", BiasClass::kGapsClusters},
    {ScenarioId::kGapsMultiple, "gaps_multiple", BiasClass::kGapsClusters},
    {ScenarioId::kGridExact, "grid_exact", BiasClass::kDiscretisation},
    {ScenarioId::kGridJittered, "grid_jittered", BiasClass::kDiscretisation},
};

const ScenarioInfo& info(ScenarioId id) {
  return kScenarioTable[static_cast<int>(id)];
}

double truncated_normal(Rng& rng, double mean, double sigma) {
  for (;;) {
    const double v = rng.normal(mean, sigma);
    if (v >= 0.0 && v <= 1.0) return v;
  }
}

double beta_draw(Rng& rng, double a, double b) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  for (;;) {
    const double x = ga(rng.engine());
    const double y = gb(rng.engine());
    const double s = x + y;
    // Both draws can underflow to zero for very small shapes.
    if (s > 0.0 && std::isfinite(s)) return std::clamp(x / s, 0.0, 1.0);
  }
}

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

}  // namespace

std::string_view scenario_name(ScenarioId id) { return info(id).name; }

BiasClass scenario_class(ScenarioId id) { return info(id).label; }

std::vector<ScenarioId> all_scenarios() {
  std::vector<ScenarioId> out;
  for (const auto& row : kScenarioTable) out.push_back(row.id);
  return out;
}

ScenarioId parse_scenario(std::string_view name) {
  for (const auto& row : kScenarioTable) {
    if (row.name == name) return row.id;
  }
  std::string valid;
  for (const auto& row : kScenarioTable) {
    if (!valid.empty()) valid += ", ";
    valid += row.name;
  }
  fail(ErrorCategory::kValidation,
       "unknown scenario id '" + std::string(name) + "'; valid ids: " + valid);
}

const std::vector<ParamSchema>& param_schema(ScenarioId id) {
  static const std::vector<ParamSchema> kSchemas[kNumScenarios] = {
      {},
      {{"sigma", 0.0, kInf, false, false, false}},
      {{"scale", 0.0, kInf, false, false, false}},
      {{"a", 0.0, 1.0, false, false, false}},
      {{"a", 0.0, 1.0, false, false, false},
       {"b", 1.0, kInf, true, false, false},
       {"upper", 0.0, 1.0, true, true, true}},
      {{"k", 2.0, kInf, true, false, true}, {"width", 0.0, 1.0, false, false, false}},
      {{"k", 2.0, kInf, true, false, true}, {"sigma", 0.0, 0.5, false, true, false}},
      {{"gap_width", 0.0, 1.0, false, false, false}},
      {{"g", 2.0, kInf, true, false, true}, {"gap_width", 0.0, 1.0, false, false, false}},
      {{"levels", 2.0, kInf, true, false, true}},
      {{"levels", 2.0, kInf, true, false, true}, {"jitter", 0.0, 0.5, false, false, false}},
  };
  return kSchemas[static_cast<int>(id)];
}

bool is_model_sample_size(std::size_t n) {
  return std::find(std::begin(kModelSampleSizes), std::end(kModelSampleSizes), n) !=
         std::end(kModelSampleSizes);
}

double ScenarioSpec::param(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end()) {
    fail(ErrorCategory::kValidation,
         "scenario " + std::string(scenario_name(id)) + " has no parameter '" + name + "'");
  }
  return it->second;
}

void ScenarioSpec::validate() const {
  const auto& schema = param_schema(id);
  const std::string where = "scenario " + std::string(scenario_name(id)) + ": ";
  require(sample_size >= 1, where + "sample_size must be positive");
  require(params.size() == schema.size(), where + "expected " + std::to_string(schema.size()) +
                                              " parameters, got " +
                                              std::to_string(params.size()));
  for (const auto& p : schema) {
    auto it = params.find(p.name);
    require(it != params.end(), where + "missing parameter '" + p.name + "'");
    const double v = it->second;
    require(std::isfinite(v), where + p.name + " must be finite");
    const bool lo_ok = p.min_inclusive ? v >= p.min : v > p.min;
    const bool hi_ok = p.max_inclusive ? v <= p.max : v < p.max;
    require(lo_ok && hi_ok, where + p.name + "=" + format_number(v) + " out of range");
    if (p.integer) require(v == std::floor(v), where + p.name + " must be an integer");
  }
  switch (id) {
    case ScenarioId::kClustersBoxes:
      require(param("width") <= 1.0 / param("k"), where + "width must not exceed 1/k");
      break;
    case ScenarioId::kGapsMultiple:
      require(param("g") * param("gap_width") < 1.0, where + "g * gap_width must be below 1");
      break;
    case ScenarioId::kGridJittered:
      require(param("jitter") < 0.5 / param("levels"),
              where + "jitter must be below half the grid step");
      break;
    default:
      break;
  }
}

std::string ScenarioSpec::key() const {
  std::string out(scenario_name(id));
  out += '(';
  bool first = true;
  for (const auto& p : param_schema(id)) {
    if (!first) out += ',';
    first = false;
    out += p.name + "=" + format_number(param(p.name));
  }
  out += ')';
  return out;
}

// ---- generators ----------------------------------------------------------

std::vector<double> sample_uniform(std::size_t n, std::uint64_t seed) {
  require(n >= 1, "sample_uniform: n must be >= 1");
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = rng.uniform();
  return out;
}

std::vector<double> sample_center(std::size_t n, double sigma, std::uint64_t seed) {
  require(n >= 1, "sample_center: n must be >= 1");
  require(sigma > 0.0 && std::isfinite(sigma), "sample_center: sigma must be positive");
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = truncated_normal(rng, 0.5, sigma);
  return out;
}

std::vector<double> sample_center_cauchy(std::size_t n, double scale, std::uint64_t seed) {
  require(n >= 1, "sample_center_cauchy: n must be >= 1");
  require(scale > 0.0 && std::isfinite(scale), "sample_center_cauchy: scale must be positive");
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) {
    double x;
    do {
      x = 0.5 + scale * std::tan(std::numbers::pi * (rng.uniform() - 0.5));
    } while (!(x >= 0.0 && x <= 1.0));
    v = x;
  }
  return out;
}

std::vector<double> sample_bounds(std::size_t n, double a, std::uint64_t seed) {
  require(n >= 1, "sample_bounds: n must be >= 1");
  require(a > 0.0 && a < 1.0, "sample_bounds: a must lie in (0,1)");
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = beta_draw(rng, a, a);
  return out;
}

std::vector<double> sample_bounds_one_sided(std::size_t n, double a, double b, bool upper,
                                            std::uint64_t seed) {
  require(n >= 1, "sample_bounds_one_sided: n must be >= 1");
  require(a > 0.0 && a < 1.0 && b >= 1.0 && std::isfinite(b),
          "sample_bounds_one_sided: need 0 < a < 1 <= b");
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) {
    const double x = beta_draw(rng, a, b);
    v = upper ? 1.0 - x : x;
  }
  return out;
}

std::vector<double> sample_clusters(std::size_t n, int k, double width, std::uint64_t seed) {
  require(n >= 1, "sample_clusters: n must be >= 1");
  require(k >= 2, "sample_clusters: k must be >= 2");
  require(width > 0.0 && width <= 1.0 / k, "sample_clusters: need 0 < width <= 1/k");
  Rng rng(seed);
  std::vector<double> centers(static_cast<std::size_t>(k));
  const double half = width / 2.0;
  for (auto& c : centers) c = rng.uniform(half, 1.0 - half);
  std::vector<double> out(n);
  for (auto& v : out) {
    const double c = centers[rng.index(centers.size())];
    v = std::clamp(rng.uniform(c - half, c + half), 0.0, 1.0);
  }
  return out;
}

std::vector<double> sample_gaussian_clusters(std::size_t n, int k, double sigma,
                                             std::uint64_t seed) {
  require(n >= 1, "sample_gaussian_clusters: n must be >= 1");
  require(k >= 2, "sample_gaussian_clusters: k must be >= 2");
  require(sigma > 0.0 && sigma <= 0.5, "sample_gaussian_clusters: need 0 < sigma <= 0.5");
  Rng rng(seed);
  std::vector<double> centers(static_cast<std::size_t>(k));
  for (auto& c : centers) c = rng.uniform();
  std::vector<double> out(n);
  for (auto& v : out) v = truncated_normal(rng, centers[rng.index(centers.size())], sigma);
  return out;
}

std::vector<double> sample_gaps(std::size_t n, int g, double gap_width, std::uint64_t seed) {
  require(n >= 1, "sample_gaps: n must be >= 1");
  require(g >= 1, "sample_gaps: g must be >= 1");
  require(gap_width > 0.0 && g * gap_width < 1.0, "sample_gaps: need 0 < g * gap_width < 1");
  Rng rng(seed);

  // g sorted offsets in the free length, each shifted by the gaps before it.
  const double free = 1.0 - g * gap_width;
  std::vector<double> starts(static_cast<std::size_t>(g));
  for (auto& s : starts) s = rng.uniform(0.0, free);
  std::sort(starts.begin(), starts.end());
  for (std::size_t i = 0; i < starts.size(); ++i) starts[i] += static_cast<double>(i) * gap_width;

  auto excluded = [&](double x) {
    return std::any_of(starts.begin(), starts.end(),
                       [&](double t) { return x >= t && x < t + gap_width; });
  };
  std::vector<double> out(n);
  for (auto& v : out) {
    double x;
    do {
      x = rng.uniform();
    } while (excluded(x));
    v = x;
  }
  return out;
}

std::vector<double> sample_discretized(std::size_t n, int levels, double jitter,
                                       std::uint64_t seed) {
  require(n >= 1, "sample_discretized: n must be >= 1");
  require(levels >= 2, "sample_discretized: levels must be >= 2");
  require(jitter >= 0.0 && jitter < 0.5 / levels,
          "sample_discretized: jitter must lie in [0, half the grid step)");
  Rng rng(seed);
  std::vector<double> out(n);
  const double step = 1.0 / levels;
  for (auto& v : out) {
    const auto cell = std::min<std::uint64_t>(
        static_cast<std::uint64_t>(rng.uniform() * levels), static_cast<std::uint64_t>(levels - 1));
    double x = (2.0 * static_cast<double>(cell) + 1.0) * step / 2.0;
    if (jitter > 0.0) x = std::clamp(x + rng.uniform(-jitter, jitter), 0.0, 1.0);
    v = x;
  }
  return out;
}

std::vector<double> generate(const ScenarioSpec& spec, std::uint64_t seed) {
  return generate(spec, seed, spec.sample_size);
}

std::vector<double> generate(const ScenarioSpec& spec, std::uint64_t seed, std::size_t n) {
  spec.validate();
  auto as_int = [&](const char* name) { return static_cast<int>(spec.param(name)); };
  switch (spec.id) {
    case ScenarioId::kUniform:
      return sample_uniform(n, seed);
    case ScenarioId::kCenterGaussian:
      return sample_center(n, spec.param("sigma"), seed);
    case ScenarioId::kCenterCauchy:
      return sample_center_cauchy(n, spec.param("scale"), seed);
    case ScenarioId::kBoundsBeta:
      return sample_bounds(n, spec.param("a"), seed);
    case ScenarioId::kBoundsOneSided:
      return sample_bounds_one_sided(n, spec.param("a"), spec.param("b"),
                                     spec.param("upper") != 0.0, seed);
    case ScenarioId::kClustersBoxes:
      return sample_clusters(n, as_int("k"), spec.param("width"), seed);
    case ScenarioId::kClustersGaussian:
      return sample_gaussian_clusters(n, as_int("k"), spec.param("sigma"), seed);
    case ScenarioId::kGapsSingle:
      return sample_gaps(n, 1, spec.param("gap_width"), seed);
    case ScenarioId::kGapsMultiple:
      return sample_gaps(n, as_int("g"), spec.param("gap_width"), seed);
    case ScenarioId::kGridExact:
      return sample_discretized(n, as_int("levels"), 0.0, seed);
    case ScenarioId::kGridJittered:
      return sample_discretized(n, as_int("levels"), spec.param("jitter"), seed);
  }
  fail(ErrorCategory::kValidation, "unhandled scenario");
}

// ---- portfolio -------------------------------------------------------------

std::vector<ScenarioSpec> candidate_grid() {
  std::vector<ScenarioSpec> out;
  auto add = [&](ScenarioId id, std::map<std::string, double> params) {
    out.push_back(ScenarioSpec{id, std::move(params), 600});
  };

  add(ScenarioId::kUniform, {});
  for (double s : {0.02, 0.04, 0.06, 0.08, 0.10, 0.12, 0.15, 0.18, 0.22, 0.26, 0.30})
    add(ScenarioId::kCenterGaussian, {{"sigma", s}});
  for (double s : {0.005, 0.01, 0.02, 0.03, 0.05, 0.07, 0.10, 0.15, 0.20, 0.30})
    add(ScenarioId::kCenterCauchy, {{"scale", s}});
  for (double a : {0.05, 0.10, 0.15, 0.20, 0.30, 0.40, 0.50, 0.60, 0.70, 0.80})
    add(ScenarioId::kBoundsBeta, {{"a", a}});
  for (double upper : {0.0, 1.0})
    for (double a : {0.2, 0.5, 0.8})
      for (double b : {1.0, 2.0, 3.0})
        add(ScenarioId::kBoundsOneSided, {{"a", a}, {"b", b}, {"upper", upper}});
  for (double k : {2.0, 3.0, 5.0, 10.0, 20.0})
    for (double w : {0.01, 0.02, 0.04}) add(ScenarioId::kClustersBoxes, {{"k", k}, {"width", w}});
  for (double k : {2.0, 3.0, 5.0, 8.0})
    for (double s : {0.01, 0.03, 0.06})
      add(ScenarioId::kClustersGaussian, {{"k", k}, {"sigma", s}});
  for (double w : {0.05, 0.08, 0.10, 0.15, 0.20, 0.25, 0.30, 0.40, 0.50})
    add(ScenarioId::kGapsSingle, {{"gap_width", w}});
  for (double g : {2.0, 3.0, 5.0, 8.0})
    for (double w : {0.02, 0.04, 0.08}) add(ScenarioId::kGapsMultiple, {{"g", g}, {"gap_width", w}});
  for (double levels : {2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 12.0, 15.0, 20.0})
    add(ScenarioId::kGridExact, {{"levels", levels}});
  for (double levels : {2.0, 3.0, 5.0, 8.0, 10.0})
    for (double frac : {0.25, 0.50, 0.75})
      add(ScenarioId::kGridJittered, {{"levels", levels}, {"jitter", frac * 0.5 / levels}});
  return out;
}

double ks_rejection_rate(const ScenarioSpec& spec, const PruneOptions& options) {
  require(options.seeds >= 1, "ks_rejection_rate: seeds must be >= 1");
  int rejected = 0;
  const std::uint64_t spec_hash = hash_string(spec.key());
  for (int s = 0; s < options.seeds; ++s) {
    const auto values = generate(spec, derive_seed(0x9e1f0a11ULL, {spec_hash, std::uint64_t(s)}),
                                 options.sample_size);
    if (ks_test(values).p_value < options.alpha) ++rejected;
  }
  return static_cast<double>(rejected) / options.seeds;
}

std::vector<ScenarioSpec> prune_near_uniform(const std::vector<ScenarioSpec>& candidates,
                                             const PruneOptions& options) {
  std::vector<ScenarioSpec> kept;
  for (const auto& spec : candidates) {
    if (spec.id == ScenarioId::kUniform ||
        ks_rejection_rate(spec, options) >= options.min_rejection_rate) {
      kept.push_back(spec);
    }
  }
  return kept;
}

const std::vector<ScenarioSpec>& enumerate_portfolio() {
  static const std::vector<ScenarioSpec> kPortfolio = prune_near_uniform(candidate_grid());
  return kPortfolio;
}

nlohmann::json to_json(const ScenarioSpec& spec) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [name, value] : spec.params) params[name] = value;
  return {{"schema_version", kPortfolioSchemaVersion},
          {"scenario_id", scenario_name(spec.id)},
          {"class_label", class_name(spec.class_label())},
          {"params", params},
          {"sample_size", spec.sample_size}};
}

ScenarioSpec spec_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<int>() != kPortfolioSchemaVersion) {
      fail(ErrorCategory::kVersion, "unsupported scenario schema version");
    }
    ScenarioSpec spec;
    spec.id = parse_scenario(j.at("scenario_id").get<std::string>());
    for (const auto& [name, value] : j.at("params").items()) spec.params[name] = value.get<double>();
    spec.sample_size = j.at("sample_size").get<std::size_t>();
    if (j.contains("class_label") &&
        parse_class(j.at("class_label").get<std::string>()) != spec.class_label()) {
      fail(ErrorCategory::kValidation, "class_label does not match scenario_id");
    }
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCategory::kParse, std::string("malformed scenario record: ") + e.what());
  }
}

std::string export_portfolio(const std::vector<ScenarioSpec>& specs) {
  std::string out;
  nlohmann::json header = {{"schema_version", kPortfolioSchemaVersion},
                           {"portfolio_version", kPortfolioVersion},
                           {"count", specs.size()}};
  out += header.dump() + "\n";
  for (const auto& spec : specs) out += to_json(spec).dump() + "\n";
  return out;
}

std::vector<ScenarioSpec> import_portfolio(std::string_view text) {
  std::vector<ScenarioSpec> specs;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header_seen = false;
  std::size_t expected = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCategory::kParse, std::string("portfolio: ") + e.what());
    }
    if (!header_seen) {
      if (!j.contains("portfolio_version")) fail(ErrorCategory::kParse, "portfolio: missing header");
      if (j.value("schema_version", -1) != kPortfolioSchemaVersion)
        fail(ErrorCategory::kVersion, "portfolio: unsupported schema version");
      expected = j.value("count", std::size_t{0});
      header_seen = true;
      continue;
    }
    specs.push_back(spec_from_json(j));
  }
  if (!header_seen || specs.size() != expected) {
    fail(ErrorCategory::kParse, "portfolio: record count does not match header");
  }
  return specs;
}

}  // namespace sbd
