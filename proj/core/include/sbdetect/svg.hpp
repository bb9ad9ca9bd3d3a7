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

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sbdetect/explain.hpp"

namespace sbd {

struct Rgb {
  int r, g, b;
  std::string hex() const;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Symmetric blue-white-red map. t in [-1, 1]; 0 maps to kNeutralColor.
Rgb diverging_color(double t);
inline constexpr Rgb kNeutralColor{247, 247, 247};

// Escapes &, <, >, " and ' for use in text nodes and attributes.
std::string xml_escape(std::string_view text);

inline constexpr int kAttributionBins = 50;

struct AttributionLabels {
  std::string predicted;
  std::string truth;  // empty when unknown
  std::string subject;
};

// Stacked-dot plot: x is the value bin (width 1/50), points sharing a bin
// stack upwards in sorted order, fill encodes phi / max|phi|. Every point
// is a <circle class="point"> carrying data-index, data-value and data-phi.
std::string render_attribution_svg(const Attribution& attribution, const AttributionLabels& labels);
void render_attribution(const Attribution& attribution, const AttributionLabels& labels,
                        const std::filesystem::path& path);

// One cell of the comparison summary (one method at one dimension and
// sample size).
struct SummaryCell {
  std::string method;
  std::size_t dimension = 0;
  std::size_t sample_size = 0;
  double fpr = 0.0;
  double fnr = 0.0;
  double f1 = 0.0;
};

// Three panels (false positives, false negatives, F1) of grouped bars.
// Bars are <rect class="bar"> with data-metric, data-method, data-dimension,
// data-sample-size and data-value.
std::string render_summary_svg(const std::vector<SummaryCell>& cells);

struct HeatmapPanel {
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::string> rows;
  // values[row][column], each in [0, 1].
  std::vector<std::vector<double>> values;
};

// Side-by-side heat maps sharing row labels. Cells are <rect class="cell">
// with data-panel, data-row, data-column and data-value.
std::string render_heatmap_svg(const std::vector<HeatmapPanel>& panels);

}  // namespace sbd
