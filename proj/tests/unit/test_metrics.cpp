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


#include <gtest/gtest.h>

#include "sbdetect/dataset.hpp"
#include "sbdetect/metrics.hpp"
#include "sbdetect/network.hpp"
#include "sbdetect/scenario.hpp"

namespace sbd {
namespace {

TEST(ConfusionMatrix, PerfectPredictions) {
  ConfusionMatrix cm;
  for (std::size_t c = 0; c < kNumClasses; ++c) cm.add(c, c, 7);
  for (std::size_t i = 0; i < kNumClasses; ++i)
    for (std::size_t j = 0; j < kNumClasses; ++j) EXPECT_EQ(cm.at(i, j), i == j ? 7u : 0u);
  EXPECT_DOUBLE_EQ(cm.macro_f1(), 1.0);
  EXPECT_DOUBLE_EQ(cm.accuracy(), 1.0);
  EXPECT_EQ(cm.total(), 35u);
}

TEST(ConfusionMatrix, TwoClassToy) {
  ConfusionMatrix cm(2);
  cm.add(0, 0, 8);
  cm.add(0, 1, 2);
  cm.add(1, 1, 8);
  cm.add(1, 0, 2);
  EXPECT_DOUBLE_EQ(cm.precision(0), 0.8);
  EXPECT_DOUBLE_EQ(cm.recall(1), 0.8);
  EXPECT_NEAR(cm.macro_f1(), 0.8, 1e-15);
}

TEST(ConfusionMatrix, AllUniformOnBalancedSet) {
  ConfusionMatrix cm;
  for (std::size_t c = 0; c < kNumClasses; ++c) cm.add(c, 0, 20);
  EXPECT_NEAR(cm.f1(0), 2.0 * 0.2 * 1.0 / 1.2, 1e-15);
  EXPECT_EQ(cm.f1(1), 0.0);
  EXPECT_NEAR(cm.macro_f1(), (2.0 * 0.2 / 1.2) / 5.0, 1e-15);
  EXPECT_NEAR(cm.macro_f1(), 0.0667, 5e-5);
}

TEST(Evaluate, ZeroNetworkPredictsUniformEverywhere) {
  // Balanced over the five classes so the degenerate score is exactly 1/15.
  DatasetSpec spec;
  spec.sample_size = 30;
  spec.master_seed = 4;
  for (auto c : kAllClasses) spec.per_class_counts[c] = 50;
  const Dataset d = build_dataset(spec, enumerate_portfolio());
  const Network zero(NetworkConfig::for_sample_size(30, 4));
  const auto e = evaluate(zero, d.validation);
  EXPECT_NEAR(e.macro_f1, 1.0 / 15.0, 1e-12);
  EXPECT_NEAR(e.accuracy, 0.2, 1e-12);
  for (std::size_t c = 0; c < kNumClasses; ++c) EXPECT_EQ(e.confusion.at(c, 0), 10u);
}

TEST(BinaryCounts, RatesAndF1) {
  BinaryCounts b;
  for (int i = 0; i < 8; ++i) b.add(true, true);
  for (int i = 0; i < 2; ++i) b.add(true, false);
  for (int i = 0; i < 9; ++i) b.add(false, false);
  b.add(false, true);
  EXPECT_DOUBLE_EQ(b.false_negative_rate(), 0.2);
  EXPECT_DOUBLE_EQ(b.false_positive_rate(), 0.1);
  EXPECT_DOUBLE_EQ(b.f1(), 16.0 / 19.0);
  const BinaryCounts empty;
  EXPECT_EQ(empty.f1(), 0.0);
}

}  // namespace
}  // namespace sbd
