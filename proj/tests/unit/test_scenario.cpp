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
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "sbdetect/error.hpp"
#include "sbdetect/rng.hpp"
#include "sbdetect/scenario.hpp"
#include "sbdetect/stat_tests.hpp"

namespace sbd {
namespace {

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double ks_reject_rate(const std::function<std::vector<double>(std::uint64_t)>& gen, int seeds) {
  int rejected = 0;
  for (int s = 0; s < seeds; ++s) rejected += ks_test(gen(static_cast<std::uint64_t>(s))).p_value < 0.01;
  return static_cast<double>(rejected) / seeds;
}

TEST(Uniform, DeterministicAndInRange) {
  EXPECT_EQ(sample_uniform(3, 9), sample_uniform(3, 9));
  for (double v : sample_uniform(10000, 1)) {
    ASSERT_GE(v, 0.0);
    ASSERT_LT(v, 1.0);
  }
}

TEST(Uniform, MillionDrawMeanIsOneHalf) {
  EXPECT_NEAR(mean(sample_uniform(1000000, 123)), 0.5, 0.002);
}

TEST(Center, TinySigmaStaysNextToOneHalf) {
  for (double v : sample_center(600, 0.001, 4)) {
    ASSERT_GE(v, 0.49);
    ASSERT_LE(v, 0.51);
  }
}

TEST(Center, HugeSigmaIsNearlyUniform) {
  const double rate = ks_reject_rate([](std::uint64_t s) { return sample_center(600, 10.0, s); }, 100);
  EXPECT_LE(rate, 0.05);
}

TEST(Center, RejectsNonPositiveSigma) {
  EXPECT_THROW(sample_center(10, 0.0, 1), Error);
  EXPECT_THROW(sample_center(10, -1.0, 1), Error);
}

TEST(Bounds, NearOneShapeHasMeanOneHalf) {
  EXPECT_NEAR(mean(sample_bounds(600, 0.999, 2)), 0.5, 0.05);
}

TEST(Bounds, SmallShapePilesMassAtTheBounds) {
  const auto v = sample_bounds(600, 0.05, 8);
  const auto near = std::count_if(v.begin(), v.end(), [](double x) { return x <= 0.1 || x >= 0.9; });
  EXPECT_GE(static_cast<double>(near) / 600.0, 0.80);
}

TEST(Bounds, LawIsSymmetricUnderReflection) {
  std::vector<double> all;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto v = sample_bounds(600, 0.3, s);
    all.insert(all.end(), v.begin(), v.end());
  }
  double worst = 0.0;
  for (double t = 0.05; t < 1.0; t += 0.05) {
    const double below = static_cast<double>(std::count_if(all.begin(), all.end(), [t](double x) { return x <= t; }));
    const double above = static_cast<double>(std::count_if(all.begin(), all.end(), [t](double x) { return 1.0 - x <= t; }));
    worst = std::max(worst, std::fabs(below - above) / static_cast<double>(all.size()));
  }
  EXPECT_LT(worst, 0.01);
}

TEST(Bounds, ShapeMustLieInOpenUnitInterval) {
  EXPECT_THROW(sample_bounds(10, 0.0, 1), Error);
  EXPECT_THROW(sample_bounds(10, 1.0, 1), Error);
}

TEST(Clusters, TwoNarrowBoxesHoldAllMass) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto v = sample_clusters(600, 2, 0.01, seed);
    std::sort(v.begin(), v.end());
    // Greedy cover with boxes of the cluster width is minimal.
    int boxes = 0;
    double end = -1.0;
    for (double x : v) {
      if (x > end + 1e-12) {
        ++boxes;
        end = x + 0.01;
      }
    }
    EXPECT_LE(boxes, 2) << "seed " << seed;
  }
}

TEST(Clusters, BoundaryWidthWithManySmallSamplesIsValid) {
  const auto v = sample_clusters(30, 20, 0.05, 5);
  ASSERT_EQ(v.size(), 30u);
  for (double x : v) {
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 1.0);
  }
  EXPECT_THROW(sample_clusters(30, 20, 0.06, 5), Error);
  EXPECT_THROW(sample_clusters(30, 1, 0.05, 5), Error);
}

double widest_empty_stretch(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double best = std::max(v.front(), 1.0 - v.back());
  for (std::size_t i = 1; i < v.size(); ++i) best = std::max(best, v[i] - v[i - 1]);
  return best;
}

TEST(Gaps, SingleGapIsEmpty) {
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    EXPECT_GE(widest_empty_stretch(sample_gaps(600, 1, 0.3, seed)), 0.3) << "seed " << seed;
}

TEST(Gaps, WideSingleGapIsDetected) {
  EXPECT_GE(ks_reject_rate([](std::uint64_t s) { return sample_gaps(600, 1, 0.3, s); }, 100), 0.95);
}

TEST(Gaps, TinyGapsOftenPassAsUniform) {
  EXPECT_LT(ks_reject_rate([](std::uint64_t s) { return sample_gaps(600, 3, 0.005, s); }, 100), 0.5);
}

TEST(Gaps, ImpossiblePlacementFails) {
  EXPECT_THROW(sample_gaps(10, 4, 0.25, 1), Error);
}

TEST(Discretized, ExactGridUsesOnlyCellCentres) {
  const std::set<double> allowed = {0.125, 0.375, 0.625, 0.875};
  const auto v = sample_discretized(600, 4, 0.0, 3);
  std::set<double> distinct(v.begin(), v.end());
  EXPECT_LE(distinct.size(), 4u);
  for (double x : distinct) EXPECT_TRUE(allowed.count(x)) << x;
}

TEST(Discretized, TwoLevelCountsAreBinomial) {
  // Binomial(600, 0.5) central 99.9% interval: 300 +- 3.29 * sqrt(150).
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto v = sample_discretized(600, 2, 0.0, seed);
    const auto low = std::count(v.begin(), v.end(), 0.25);
    EXPECT_EQ(std::count(v.begin(), v.end(), 0.75) + low, 600);
    EXPECT_GE(low, 260);
    EXPECT_LE(low, 340);
  }
}

TEST(Discretized, JitterStaysBelowHalfStep) {
  EXPECT_THROW(sample_discretized(10, 4, 0.125, 1), Error);
  for (double x : sample_discretized(600, 4, 0.1, 1)) {
    const double nearest = (std::floor(x * 4) + 0.5) / 4;
    EXPECT_LE(std::fabs(x - nearest), 0.1 + 1e-12);
  }
}

TEST(ScenarioSpec, ValidatesNamesRangesAndIntegrality) {
  ScenarioSpec ok{ScenarioId::kGridExact, {{"levels", 5}}, 100};
  EXPECT_NO_THROW(ok.validate());
  EXPECT_EQ(ok.key(), "grid_exact(levels=5)");
  EXPECT_EQ(ok.class_label(), BiasClass::kDiscretisation);

  ScenarioSpec fractional{ScenarioId::kGridExact, {{"levels", 2.5}}, 100};
  EXPECT_THROW(fractional.validate(), Error);
  ScenarioSpec unknown{ScenarioId::kCenterGaussian, {{"mu", 0.1}}, 100};
  EXPECT_THROW(unknown.validate(), Error);
  ScenarioSpec missing{ScenarioId::kBoundsBeta, {}, 100};
  EXPECT_THROW(missing.validate(), Error);
  ScenarioSpec out_of_range{ScenarioId::kBoundsBeta, {{"a", 1.5}}, 100};
  EXPECT_THROW(out_of_range.validate(), Error);
}

TEST(ScenarioSpec, EveryIdHasOneClassAndRoundTripsItsName) {
  std::set<BiasClass> classes;
  for (auto id : all_scenarios()) {
    EXPECT_EQ(parse_scenario(scenario_name(id)), id);
    classes.insert(scenario_class(id));
  }
  EXPECT_EQ(all_scenarios().size(), kNumScenarios);
  EXPECT_EQ(classes.size(), kNumClasses);
  EXPECT_THROW(parse_scenario("nonsense"), Error);
}

TEST(Portfolio, CoversEveryScenarioAndClassAndIsStable) {
  const auto& p = enumerate_portfolio();
  EXPECT_GE(p.size(), 100u);
  std::set<ScenarioId> ids;
  std::set<BiasClass> classes;
  for (const auto& s : p) {
    EXPECT_NO_THROW(s.validate()) << s.key();
    ids.insert(s.id);
    classes.insert(s.class_label());
  }
  EXPECT_EQ(ids.size(), kNumScenarios);
  EXPECT_EQ(classes.size(), kNumClasses);
  EXPECT_EQ(&p, &enumerate_portfolio());
  EXPECT_EQ(p, prune_near_uniform(candidate_grid()));
}

TEST(Portfolio, RetainedBiasedSpecsAreSeparable) {
  PruneOptions opt;
  for (const auto& s : enumerate_portfolio()) {
    if (s.id == ScenarioId::kUniform) continue;
    EXPECT_GE(ks_rejection_rate(s, opt), opt.min_rejection_rate) << s.key();
  }
}

TEST(Portfolio, EveryValueInRangeForEverySpecAndSeed) {
  for (const auto& s : enumerate_portfolio()) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto v = generate(s, seed);
      ASSERT_EQ(v.size(), s.sample_size);
      for (double x : v) ASSERT_TRUE(x >= 0.0 && x <= 1.0) << s.key() << " seed " << seed;
    }
  }
}

TEST(Portfolio, GenerationIsAPureFunction) {
  for (const auto& s : enumerate_portfolio()) EXPECT_EQ(generate(s, 77, 50), generate(s, 77, 50)) << s.key();
}

TEST(Portfolio, ExportImportRoundTrip) {
  const auto& p = enumerate_portfolio();
  const std::string text = export_portfolio(p);
  EXPECT_NE(text.find(kPortfolioVersion), std::string::npos);
  EXPECT_EQ(import_portfolio(text), p);
  EXPECT_THROW(import_portfolio("{not json"), Error);
}

}  // namespace
}  // namespace sbd
