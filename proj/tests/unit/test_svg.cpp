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


#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <gtest/gtest.h>

#include "sbdetect/svg.hpp"

namespace sbd {
namespace {

namespace pt = boost::property_tree;

pt::ptree parse_xml(const std::string& text) {
  std::istringstream in(text);
  pt::ptree tree;
  pt::read_xml(in, tree);
  return tree;
}

// Every element named `tag` whose class attribute equals `cls`.
std::vector<pt::ptree> find_all(const pt::ptree& tree, const std::string& tag, const std::string& cls) {
  std::vector<pt::ptree> out;
  std::function<void(const pt::ptree&)> walk = [&](const pt::ptree& node) {
    for (const auto& [name, child] : node) {
      if (name == "<xmlattr>") continue;
      if (name == tag && child.get<std::string>("<xmlattr>.class", "") == cls) out.push_back(child);
      walk(child);
    }
  };
  walk(tree);
  return out;
}

Attribution sample_attribution() {
  Attribution a;
  a.target_class = BiasClass::kDiscretisation;
  for (int i = 0; i < 30; ++i) {
    a.values.push_back((i % 3) * 0.4 + 0.001 * i);
    a.phi.push_back(i == 4 ? 0.0 : (i % 2 ? 0.02 : -0.01) * (i + 1));
  }
  a.base_value = 0.2;
  a.prediction_value = 0.7;
  return a;
}

TEST(DivergingColor, EndpointsAndNeutral) {
  EXPECT_EQ(diverging_color(0.0), kNeutralColor);
  EXPECT_EQ(diverging_color(-1.0), (Rgb{33, 102, 172}));
  EXPECT_EQ(diverging_color(1.0), (Rgb{178, 24, 43}));
  EXPECT_EQ(diverging_color(7.0), diverging_color(1.0));
  EXPECT_EQ(kNeutralColor.hex(), "#f7f7f7");
}

TEST(XmlEscape, SpecialCharacters) {
  EXPECT_EQ(xml_escape("a<b & \"c\" 'd'>"), "a&lt;b &amp; &quot;c&quot; &apos;d&apos;&gt;");
}

TEST(AttributionSvg, WellFormedWithOnePointPerValue) {
  const auto a = sample_attribution();
  const auto svg = render_attribution_svg(a, {"Discretisation", "Discretisation", "run <7>"});
  const auto tree = parse_xml(svg);
  const auto points = find_all(tree, "circle", "point");
  ASSERT_EQ(points.size(), a.values.size());
  std::map<int, std::string> fill_by_index;
  for (const auto& p : points) {
    const int idx = p.get<int>("<xmlattr>.data-index");
    EXPECT_DOUBLE_EQ(p.get<double>("<xmlattr>.data-value"), a.values[idx]);
    EXPECT_DOUBLE_EQ(p.get<double>("<xmlattr>.data-phi"), a.phi[idx]);
    fill_by_index[idx] = p.get<std::string>("<xmlattr>.fill");
  }
  EXPECT_EQ(fill_by_index.at(4), kNeutralColor.hex());
  EXPECT_NE(svg.find("run &lt;7&gt;"), std::string::npos);
}

TEST(AttributionSvg, PointsInOneBinStackUpwards) {
  Attribution a;
  a.values = {0.101, 0.102, 0.103, 0.9};
  a.phi = {0.1, -0.1, 0.05, 0.0};
  const auto tree = parse_xml(render_attribution_svg(a, {"Uniform", "", "s"}));
  std::map<int, std::pair<double, double>> xy;
  for (const auto& p : find_all(tree, "circle", "point"))
    xy[p.get<int>("<xmlattr>.data-index")] = {p.get<double>("<xmlattr>.cx"),
                                              p.get<double>("<xmlattr>.cy")};
  ASSERT_EQ(xy.size(), 4u);
  EXPECT_EQ(xy[0].first, xy[1].first);
  EXPECT_EQ(xy[1].first, xy[2].first);
  EXPECT_GT(xy[0].second, xy[1].second);
  EXPECT_GT(xy[1].second, xy[2].second);
  EXPECT_GT(xy[3].first, xy[0].first);
  EXPECT_EQ(xy[3].second, xy[0].second);
}

TEST(SummarySvg, OneBarPerMetricAndCell) {
  const std::vector<SummaryCell> cells = {
      {"stat", 1, 100, 0.01, 0.3, 0.8}, {"deep", 1, 100, 0.02, 0.1, 0.9},
      {"stat", 10, 600, 0.0, 0.2, 0.85}, {"deep", 10, 600, 0.05, 0.05, 0.95}};
  const auto tree = parse_xml(render_summary_svg(cells));
  const auto bars = find_all(tree, "rect", "bar");
  ASSERT_EQ(bars.size(), 12u);
  int found = 0;
  for (const auto& b : bars) {
    if (b.get<std::string>("<xmlattr>.data-metric") == "fnr" &&
        b.get<std::string>("<xmlattr>.data-method") == "deep" &&
        b.get<int>("<xmlattr>.data-dimension") == 10) {
      EXPECT_DOUBLE_EQ(b.get<double>("<xmlattr>.data-value"), 0.05);
      EXPECT_EQ(b.get<int>("<xmlattr>.data-sample-size"), 600);
      ++found;
    }
  }
  EXPECT_EQ(found, 1);
}

TEST(HeatmapSvg, OneCellPerEntry) {
  HeatmapPanel deep{"deep", {"Uniform", "Center"}, {"A", "B", "C"}, {{0.1, 0.9}, {0.5, 0.5}, {1, 0}}};
  HeatmapPanel stat{"stat", {"KS"}, {"A", "B", "C"}, {{0.2}, {0.0}, {1.0}}};
  const auto tree = parse_xml(render_heatmap_svg({deep, stat}));
  const auto cells = find_all(tree, "rect", "cell");
  ASSERT_EQ(cells.size(), 9u);
  for (const auto& c : cells) {
    if (c.get<std::string>("<xmlattr>.data-panel") == "stat" &&
        c.get<std::string>("<xmlattr>.data-row") == "C") {
      EXPECT_DOUBLE_EQ(c.get<double>("<xmlattr>.data-value"), 1.0);
    }
  }
}

}  // namespace
}  // namespace sbd
