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

#include "sbdetect/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "sbdetect/error.hpp"
#include "sbdetect/io_util.hpp"

namespace sbd {
namespace {

constexpr Rgb kBlue{33, 102, 172};
constexpr Rgb kRed{178, 24, 43};

Rgb lerp(const Rgb& a, const Rgb& b, double t) {
  auto mix = [t](int x, int y) {
    return static_cast<int>(std::lround(static_cast<double>(x) + t * static_cast<double>(y - x)));
  };
  return {mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)};
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

class Svg {
 public:
  Svg(double width, double height) : width_(width), height_(height) {}

  void raw(const std::string& s) { body_ += s; }
  void text(double x, double y, std::string_view s, std::string_view extra = {}) {
    body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\"";
    if (!extra.empty()) body_ += " " + std::string(extra);
    body_ += ">" + xml_escape(s) + "</text>\n";
  }
  void line(double x1, double y1, double x2, double y2, std::string_view stroke = "#444") {
    body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
             "\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"1\"/>\n";
  }
  std::string str() const {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_) + "\" height=\"" +
           num(height_) + "\" viewBox=\"0 0 " + num(width_) + " " + num(height_) +
           "\" font-family=\"sans-serif\" font-size=\"12\">\n"
           "<rect x=\"0\" y=\"0\" width=\"" + num(width_) + "\" height=\"" + num(height_) +
           "\" fill=\"white\"/>\n" + body_ + "</svg>\n";
  }

 private:
  double width_, height_;
  std::string body_;
};

std::string attr(std::string_view name, std::string_view value) {
  return " " + std::string(name) + "=\"" + xml_escape(value) + "\"";
}

}  // namespace

std::string Rgb::hex() const {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

Rgb diverging_color(double t) {
  if (!std::isfinite(t)) t = 0.0;
  t = std::clamp(t, -1.0, 1.0);
  if (t == 0.0) return kNeutralColor;
  return t > 0 ? lerp(kNeutralColor, kRed, t) : lerp(kNeutralColor, kBlue, -t);
}

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_attribution_svg(const Attribution& a, const AttributionLabels& labels) {
  if (a.values.size() != a.phi.size())
    fail(ErrorCategory::kShape, "attribution values and phi differ in length");
  const double left = 50, right = 30, top = 50, bottom = 70, plot_w = 600;
  const double radius = 4.0;
  std::vector<int> bin(a.values.size());
  std::map<int, int> stack_height;
  std::vector<int> level(a.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    bin[i] = std::clamp(static_cast<int>(std::floor(a.values[i] * kAttributionBins)), 0, kAttributionBins - 1);
    level[i] = stack_height[bin[i]]++;
  }
  int tallest = 1;
  for (const auto& [b, h] : stack_height) tallest = std::max(tallest, h);
  const double plot_h = std::max(120.0, 2.0 * radius * tallest + 10);
  Svg svg(left + plot_w + right, top + plot_h + bottom);

  double scale = 0.0;
  for (double p : a.phi) scale = std::max(scale, std::fabs(p));

  std::string title = "target: " + std::string(class_name(a.target_class));
  if (!labels.predicted.empty()) title += "  predicted: " + labels.predicted;
  if (!labels.truth.empty()) title += "  true: " + labels.truth;
  if (!labels.subject.empty()) title = labels.subject + "  " + title;
  svg.text(left, 24, title, "font-size=\"14\"");

  const double base_y = top + plot_h;
  svg.line(left, base_y, left + plot_w, base_y);
  for (int t = 0; t <= 10; ++t) {
    const double x = left + plot_w * t / 10.0;
    svg.line(x, base_y, x, base_y + 5);
    svg.text(x - 8, base_y + 18, num(t / 10.0).substr(0, 3));
  }
  svg.text(left + plot_w / 2 - 15, base_y + 34, "value");

  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double cx = left + plot_w * (bin[i] + 0.5) / kAttributionBins;
    const double cy = base_y - radius - 2.0 * radius * level[i] - 1;
    const Rgb fill = scale > 0 ? diverging_color(a.phi[i] / scale) : kNeutralColor;
    svg.raw("<circle class=\"point\" cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(radius) +
            "\" fill=\"" + fill.hex() + "\" stroke=\"#666\" stroke-width=\"0.5\"" +
            attr("data-index", std::to_string(i)) + attr("data-value", format_real(a.values[i])) +
            attr("data-phi", format_real(a.phi[i])) + "/>\n");
  }

  // Legend: gradient bar from -max|phi| to +max|phi|.
  const double ly = base_y + 46, lw = 200, lx = left + plot_w - lw;
  svg.raw("<defs><linearGradient id=\"phi-scale\" x1=\"0\" x2=\"1\" y1=\"0\" y2=\"0\">"
          "<stop offset=\"0\" stop-color=\"" + kBlue.hex() + "\"/>"
          "<stop offset=\"0.5\" stop-color=\"" + kNeutralColor.hex() + "\"/>"
          "<stop offset=\"1\" stop-color=\"" + kRed.hex() + "\"/></linearGradient></defs>\n");
  svg.raw("<rect class=\"legend\" x=\"" + num(lx) + "\" y=\"" + num(ly) + "\" width=\"" + num(lw) +
          "\" height=\"10\" fill=\"url(#phi-scale)\" stroke=\"#666\" stroke-width=\"0.5\"/>\n");
  char lo[32], hi[32];
  std::snprintf(lo, sizeof lo, "%.3g", -scale);
  std::snprintf(hi, sizeof hi, "%.3g", scale);
  svg.text(lx - 40, ly + 9, lo);
  svg.text(lx + lw + 4, ly + 9, hi);
  svg.text(lx - 120, ly + 9, "SHAP value");
  return svg.str();
}

void render_attribution(const Attribution& attribution, const AttributionLabels& labels,
                        const std::filesystem::path& path) {
  write_text_file(path, render_attribution_svg(attribution, labels));
}

std::string render_summary_svg(const std::vector<SummaryCell>& cells) {
  std::vector<std::string> methods;
  std::vector<std::pair<std::size_t, std::size_t>> groups;  // (sample_size, dimension)
  for (const auto& c : cells) {
    if (std::find(methods.begin(), methods.end(), c.method) == methods.end()) methods.push_back(c.method);
    const std::pair<std::size_t, std::size_t> g{c.sample_size, c.dimension};
    if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
  }
  std::sort(groups.begin(), groups.end());
  const std::array<std::string, 3> metrics = {"fpr", "fnr", "f1"};
  const std::array<std::string, 3> titles = {"false positive rate", "false negative rate", "F1"};
  const std::array<std::string, 4> palette = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a"};

  const double bar_w = 14, group_gap = 16, panel_h = 200, left = 50, top = 50;
  const double group_w = bar_w * static_cast<double>(std::max<std::size_t>(1, methods.size())) + group_gap;
  const double panel_w = std::max(160.0, group_w * static_cast<double>(groups.size()) + 20);
  Svg svg(left + 3 * (panel_w + 40), top + panel_h + 90);
  for (std::size_t p = 0; p < metrics.size(); ++p) {
    const double px = left + static_cast<double>(p) * (panel_w + 40);
    const double base_y = top + panel_h;
    svg.text(px, top - 12, titles[p], "font-size=\"14\"");
    svg.line(px, base_y, px + panel_w, base_y);
    svg.line(px, top, px, base_y);
    for (int t = 0; t <= 4; ++t) {
      const double y = base_y - panel_h * t / 4.0;
      svg.line(px - 4, y, px, y);
      svg.text(px - 34, y + 4, num(t / 4.0));
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const double gx = px + 10 + static_cast<double>(g) * group_w;
      svg.text(gx, base_y + 16, "d=" + std::to_string(groups[g].second), "font-size=\"10\"");
      svg.text(gx, base_y + 28, "N=" + std::to_string(groups[g].first), "font-size=\"10\"");
      for (std::size_t m = 0; m < methods.size(); ++m) {
        auto it = std::find_if(cells.begin(), cells.end(), [&](const SummaryCell& c) {
          return c.method == methods[m] && c.sample_size == groups[g].first && c.dimension == groups[g].second;
        });
        if (it == cells.end()) continue;
        const double v = p == 0 ? it->fpr : (p == 1 ? it->fnr : it->f1);
        const double h = panel_h * std::clamp(v, 0.0, 1.0);
        svg.raw("<rect class=\"bar\" x=\"" + num(gx + bar_w * static_cast<double>(m)) + "\" y=\"" +
                num(base_y - h) + "\" width=\"" + num(bar_w - 2) + "\" height=\"" + num(h) + "\" fill=\"" +
                palette[m % palette.size()] + "\"" + attr("data-metric", metrics[p]) +
                attr("data-method", it->method) + attr("data-dimension", std::to_string(it->dimension)) +
                attr("data-sample-size", std::to_string(it->sample_size)) +
                attr("data-value", format_real(v)) + "/>\n");
      }
    }
  }
  for (std::size_t m = 0; m < methods.size(); ++m) {
    const double lx = left + static_cast<double>(m) * 140;
    const double ly = top + panel_h + 56;
    svg.raw("<rect x=\"" + num(lx) + "\" y=\"" + num(ly) + "\" width=\"12\" height=\"12\" fill=\"" +
            palette[m % palette.size()] + "\"/>\n");
    svg.text(lx + 16, ly + 11, methods[m]);
  }
  return svg.str();
}

std::string render_heatmap_svg(const std::vector<HeatmapPanel>& panels) {
  require(!panels.empty(), "heat map needs at least one panel");
  std::size_t rows = panels.front().rows.size();
  for (const auto& p : panels) {
    require(p.rows.size() == rows && p.values.size() == rows, "heat map panels must share rows");
    for (const auto& r : p.values) require(r.size() == p.columns.size(), "heat map row width mismatch");
  }
  const double cell = 26, label_w = 230, top = 120, gap = 40;
  double width = label_w;
  for (const auto& p : panels) width += cell * static_cast<double>(p.columns.size()) + gap;
  Svg svg(width + 20, top + cell * static_cast<double>(rows) + 60);
  for (std::size_t r = 0; r < rows; ++r)
    svg.text(8, top + cell * (static_cast<double>(r) + 0.65), panels.front().rows[r], "font-size=\"11\"");
  double px = label_w;
  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const auto& p = panels[pi];
    svg.text(px, 20, p.title, "font-size=\"13\"");
    for (std::size_t c = 0; c < p.columns.size(); ++c) {
      const double x = px + cell * (static_cast<double>(c) + 0.6);
      svg.raw("<text x=\"" + num(x) + "\" y=\"" + num(top - 6) + "\" transform=\"rotate(-60 " + num(x) + " " +
              num(top - 6) + ")\" font-size=\"11\">" + xml_escape(p.columns[c]) + "</text>\n");
    }
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < p.columns.size(); ++c) {
        const double v = p.values[r][c];
        // Sequential white-to-red scale over [0, 1].
        const Rgb fill = diverging_color(std::clamp(v, 0.0, 1.0));
        svg.raw("<rect class=\"cell\" x=\"" + num(px + cell * static_cast<double>(c)) + "\" y=\"" +
                num(top + cell * static_cast<double>(r)) + "\" width=\"" + num(cell - 1) + "\" height=\"" +
                num(cell - 1) + "\" fill=\"" + fill.hex() + "\"" + attr("data-panel", p.title) +
                attr("data-row", p.rows[r]) + attr("data-column", p.columns[c]) +
                attr("data-value", format_real(v)) + "/>\n");
      }
    }
    px += cell * static_cast<double>(p.columns.size()) + gap;
  }
  return svg.str();
}

}  // namespace sbd
