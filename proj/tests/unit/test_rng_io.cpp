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
#include <limits>
#include <set>

#include <gtest/gtest.h>

#include "sbdetect/error.hpp"
#include "sbdetect/io_util.hpp"
#include "sbdetect/rng.hpp"
#include "test_support.hpp"

namespace sbd {
namespace {

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.uniform(), b.uniform());
}

TEST(Rng, UniformStaysInHalfOpenUnitInterval) {
  Rng r(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, IndexCoversRangeWithoutEscaping) {
  Rng r(3);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto k = r.index(7);
    ASSERT_LT(k, 7u);
    seen.insert(k);
  }
  EXPECT_EQ(seen.size(), 7u);
  EXPECT_THROW(r.index(0), Error);
}

TEST(Rng, NormalMomentsAreStandard) {
  Rng r(11);
  const int n = 200000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal(0.0, 1.0);
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(DeriveSeed, DependsOnEveryKeyAndItsOrder) {
  const auto base = derive_seed(7, {1, 2});
  EXPECT_EQ(base, derive_seed(7, {1, 2}));
  EXPECT_NE(base, derive_seed(7, {2, 1}));
  EXPECT_NE(base, derive_seed(8, {1, 2}));
  EXPECT_NE(base, derive_seed(7, {1, 3}));
  EXPECT_NE(derive_seed(7, {1}), derive_seed(7, {1, 0}));
}

TEST(HashString, MatchesFnv1aReferenceValues) {
  EXPECT_EQ(hash_string(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(hash_string("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(hash_string("foobar"), 0x85944171f73967e8ull);
}

TEST(FormatReal, RoundTripsExactly) {
  Rng r(5);
  for (int i = 0; i < 10000; ++i) {
    const double v = r.uniform() * std::pow(10.0, static_cast<double>(r.index(20)) - 10.0);
    ASSERT_EQ(parse_real(format_real(v)), v);
  }
  EXPECT_EQ(parse_real(format_real(0.1)), 0.1);
  EXPECT_EQ(format_real(0.5), "0.5");
  EXPECT_EQ(parse_real(format_real(std::nextafter(1.0, 0.0))), std::nextafter(1.0, 0.0));
}

TEST(ParseReal, RejectsMalformedFields) {
  for (const char* bad : {"", "abc", "1.0x", "nan", "inf", "1e999", " 1"}) {
    try {
      parse_real(bad);
      FAIL() << "accepted '" << bad << "'";
    } catch (const Error& e) {
      EXPECT_EQ(e.category(), ErrorCategory::kParse) << bad;
    }
  }
}

TEST(ParseInteger, AcceptsSignedAndRejectsFractions) {
  EXPECT_EQ(parse_integer("-12"), -12);
  EXPECT_EQ(parse_integer("0"), 0);
  EXPECT_THROW(parse_integer("1.5"), Error);
  EXPECT_THROW(parse_integer(""), Error);
}

TEST(SplitLines, DropsCarriageReturnsAndTrailingBlankLines) {
  const auto lines = split_lines("a,b\r\nc\n\n");
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0], "a,b");
  EXPECT_EQ(lines[1], "c");
  const auto fields = split_fields("x,,y");
  ASSERT_EQ(fields.size(), 3u);
  EXPECT_EQ(fields[1], "");
}

TEST(TextFiles, MissingFileIsAnIoError) {
  testing::TempDir dir;
  try {
    read_text_file(dir / "absent.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kIo);
  }
  write_text_file(dir / "x.txt", "hello\n");
  EXPECT_EQ(read_text_file(dir / "x.txt"), "hello\n");
}

TEST(ErrorCategories, HaveDistinctNamesAndExitCodes) {
  std::set<std::string> names;
  std::set<int> codes;
  for (auto c : {ErrorCategory::kValidation, ErrorCategory::kIo, ErrorCategory::kParse, ErrorCategory::kShape,
                 ErrorCategory::kCorrupt, ErrorCategory::kVersion, ErrorCategory::kDivergence}) {
    names.insert(std::string(category_name(c)));
    codes.insert(exit_code(c));
    EXPECT_GT(exit_code(c), 1);
  }
  EXPECT_EQ(names.size(), 7u);
  EXPECT_EQ(codes.size(), 7u);
}

}  // namespace
}  // namespace sbd
