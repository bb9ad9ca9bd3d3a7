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

#include <cmath>

#include <gtest/gtest.h>

#include "sbdetect/dataset.hpp"
#include "sbdetect/error.hpp"
#include "sbdetect/io_util.hpp"
#include "test_support.hpp"

namespace sbd {
namespace {

bool same_samples(const std::vector<LabeledSample>& a, const std::vector<LabeledSample>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].values != b[i].values || a[i].label != b[i].label || a[i].scenario != b[i].scenario ||
        a[i].seed != b[i].seed)
      return false;
  }
  return true;
}

TEST(BuildDataset, DeskRatioSplitsEightyTwenty) {
  const auto spec = DatasetSpec::balanced(200, 30, 1);
  EXPECT_EQ(spec.per_class_counts.at(BiasClass::kUniform), 800u);
  const Dataset d = build_dataset(spec, enumerate_portfolio());
  EXPECT_EQ(d.train.size(), 1280u);
  EXPECT_EQ(d.validation.size(), 320u);
  const auto val = count_by_class(d.validation);
  const auto tr = count_by_class(d.train);
  for (auto c : kAllClasses) {
    const std::size_t requested = spec.per_class_counts.at(c);
    EXPECT_EQ(val.at(c), static_cast<std::size_t>(std::lround(0.2 * static_cast<double>(requested))));
    EXPECT_EQ(tr.at(c) + val.at(c), requested);
  }
  // 4:1 scheme: uniform equals the sum of the bias classes.
  std::size_t bias = 0;
  for (auto c : kAllClasses)
    if (c != BiasClass::kUniform) bias += spec.per_class_counts.at(c);
  EXPECT_EQ(spec.per_class_counts.at(BiasClass::kUniform), bias);
}

TEST(BuildDataset, SpreadsEachClassEvenlyOverItsSpecs) {
  const auto& portfolio = enumerate_portfolio();
  const Dataset d = build_dataset(DatasetSpec::balanced(200, 30, 4), portfolio);
  std::map<std::size_t, std::size_t> per_spec;
  for (const auto* set : {&d.train, &d.validation})
    for (const auto& s : *set) ++per_spec[s.spec_index];
  std::map<BiasClass, std::pair<std::size_t, std::size_t>> range;
  for (const auto& [idx, count] : per_spec) {
    auto& r = range.try_emplace(portfolio[idx].class_label(), count, count).first->second;
    r.first = std::min(r.first, count);
    r.second = std::max(r.second, count);
  }
  for (const auto& [c, r] : range) EXPECT_LE(r.second - r.first, 1u) << class_name(c);
}

TEST(BuildDataset, SameSeedIsBitIdenticalAndOtherSeedDiffers) {
  const auto& p = enumerate_portfolio();
  const Dataset a = build_dataset(DatasetSpec::balanced(50, 30, 9), p);
  const Dataset b = build_dataset(DatasetSpec::balanced(50, 30, 9), p);
  const Dataset c = build_dataset(DatasetSpec::balanced(50, 30, 10), p);
  EXPECT_TRUE(same_samples(a.train, b.train));
  EXPECT_TRUE(same_samples(a.validation, b.validation));
  EXPECT_FALSE(same_samples(a.train, c.train));
}

TEST(BuildDataset, MissingClassInPortfolioIsAnError) {
  const auto only_uniform = select_portfolio(enumerate_portfolio(), {"uniform"});
  EXPECT_THROW(build_dataset(DatasetSpec::balanced(50, 30, 1), only_uniform), Error);
}

TEST(SelectPortfolio, UnknownIdIsAValidationError) {
  try {
    select_portfolio(enumerate_portfolio(), {"uniform", "grid_wobbly"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kValidation);
  }
}

TEST(DatasetCsv, RoundTripsValuesExactly) {
  const Dataset d = build_dataset(DatasetSpec::balanced(50, 30, 2), enumerate_portfolio());
  const auto text = format_dataset_csv(d.train, 30);
  EXPECT_EQ(text.substr(0, 8), "x_0,x_1,");
  const auto back = parse_dataset_csv(text);
  EXPECT_TRUE(same_samples(back, d.train));
}

TEST(DatasetCsv, MalformedRowsAreParseErrors) {
  try {
    parse_dataset_csv("x_0,x_1,label,scenario_id,seed\n0.1,0.2,center,center_gaussian\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kParse);
  }
  EXPECT_THROW(parse_dataset_csv("x_0,x_1,label,scenario_id,seed\n0.1,1.5,center,center_gaussian,3\n"), Error);
}

TEST(DatasetFiles, ManifestRegeneratesBitIdenticalData) {
  testing::TempDir dir;
  const auto spec = DatasetSpec::balanced(50, 50, 21);
  const Dataset d = build_dataset(spec, enumerate_portfolio());
  const auto manifest = write_dataset(dir.path(), d, spec, {});
  EXPECT_EQ(read_manifest(dir.path()), manifest);
  const Dataset back = read_dataset(dir.path());
  EXPECT_TRUE(same_samples(back.train, d.train));
  const Dataset regen = regenerate_from_manifest(manifest);
  EXPECT_TRUE(same_samples(regen.train, d.train));
  EXPECT_TRUE(same_samples(regen.validation, d.validation));
  EXPECT_EQ(format_dataset_csv(regen.train, 50), read_text_file(dir / "train.csv"));
}

TEST(DatasetFiles, ChecksumMismatchIsCorrupt) {
  testing::TempDir dir;
  const auto spec = DatasetSpec::balanced(50, 30, 3);
  write_dataset(dir.path(), build_dataset(spec, enumerate_portfolio()), spec, {});
  std::string text = read_text_file(dir / "train.csv");
  text[text.size() / 2] = text[text.size() / 2] == '1' ? '2' : '1';
  write_text_file(dir / "train.csv", text);
  try {
    read_dataset(dir.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kCorrupt);
  }
}

}  // namespace
}  // namespace sbd
