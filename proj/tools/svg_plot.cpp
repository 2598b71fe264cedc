// Copyright 2026 The bellkc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace bellkc::cli {

namespace {

constexpr double kWidth = 760;
constexpr double kPanelHeight = 320;
constexpr double kLeft = 70;
constexpr double kRight = 170;
constexpr double kTop = 40;
constexpr double kBottom = 50;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void render_panel(std::string& svg, const Panel& p, double y_offset) {
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kPanelHeight - kTop - kBottom;
  const double x0 = kLeft;
  const double y0 = y_offset + kTop;
  const double x_span = p.x_max > p.x_min ? p.x_max - p.x_min : 1.0;
  const double y_span = p.y_max > p.y_min ? p.y_max - p.y_min : 1.0;
  auto sx = [&](double x) { return x0 + (x - p.x_min) / x_span * plot_w; };
  auto sy = [&](double y) { return y0 + plot_h - (std::clamp(y, p.y_min, p.y_max) - p.y_min) / y_span * plot_h; };

  svg += "<text x=\"" + num(x0 + plot_w / 2) + "\" y=\"" + num(y_offset + 24) +
         "\" text-anchor=\"middle\" font-size=\"15\">" + escape(p.title) + "</text>\n";
  svg += "<rect x=\"" + num(x0) + "\" y=\"" + num(y0) + "\" width=\"" + num(plot_w) + "\" height=\"" +
         num(plot_h) + "\" fill=\"none\" stroke=\"#000\"/>\n";

  constexpr int kTicks = 5;
  for (int i = 0; i < kTicks; ++i) {
    const double fx = p.x_min + x_span * i / (kTicks - 1);
    const double fy = p.y_min + y_span * i / (kTicks - 1);
    svg += "<line x1=\"" + num(sx(fx)) + "\" y1=\"" + num(y0 + plot_h) + "\" x2=\"" + num(sx(fx)) + "\" y2=\"" +
           num(y0 + plot_h + 5) + "\" stroke=\"#000\"/>\n";
    svg += "<text x=\"" + num(sx(fx)) + "\" y=\"" + num(y0 + plot_h + 18) +
           "\" text-anchor=\"middle\" font-size=\"11\">" + tick_label(fx) + "</text>\n";
    svg += "<line x1=\"" + num(x0 - 5) + "\" y1=\"" + num(sy(fy)) + "\" x2=\"" + num(x0) + "\" y2=\"" +
           num(sy(fy)) + "\" stroke=\"#000\"/>\n";
    svg += "<text x=\"" + num(x0 - 8) + "\" y=\"" + num(sy(fy) + 4) +
           "\" text-anchor=\"end\" font-size=\"11\">" + tick_label(fy) + "</text>\n";
  }
  svg += "<text x=\"" + num(x0 + plot_w / 2) + "\" y=\"" + num(y0 + plot_h + 38) +
         "\" text-anchor=\"middle\" font-size=\"12\">" + escape(p.x_label) + "</text>\n";
  svg += "<text transform=\"translate(" + num(18) + "," + num(y0 + plot_h / 2) +
         ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" + escape(p.y_label) + "</text>\n";

  for (const auto& ref : p.references) {
    if (ref.y < p.y_min || ref.y > p.y_max) continue;
    svg += "<line x1=\"" + num(x0) + "\" y1=\"" + num(sy(ref.y)) + "\" x2=\"" + num(x0 + plot_w) + "\" y2=\"" +
           num(sy(ref.y)) + "\" stroke=\"" + ref.color + "\" stroke-dasharray=\"6,4\"/>\n";
    svg += "<text x=\"" + num(x0 + plot_w + 6) + "\" y=\"" + num(sy(ref.y) + 4) + "\" font-size=\"11\" fill=\"" +
           ref.color + "\">" + escape(ref.label) + "</text>\n";
  }

  double legend_y = y0 + 10;
  for (const auto& s : p.series) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (s.as_points) {
      for (std::size_t i = 0; i < n; ++i) {
        if (i < s.err.size() && s.err[i] > 0) {
          svg += "<line x1=\"" + num(sx(s.x[i])) + "\" y1=\"" + num(sy(s.y[i] - s.err[i])) + "\" x2=\"" +
                 num(sx(s.x[i])) + "\" y2=\"" + num(sy(s.y[i] + s.err[i])) + "\" stroke=\"" + s.color + "\"/>\n";
        }
        svg += "<circle cx=\"" + num(sx(s.x[i])) + "\" cy=\"" + num(sy(s.y[i])) + "\" r=\"3\" fill=\"" + s.color +
               "\"/>\n";
      }
    } else if (n > 0) {
      svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < n; ++i) svg += (i ? " " : "") + num(sx(s.x[i])) + "," + num(sy(s.y[i]));
      svg += "\"/>\n";
    }
    svg += "<rect x=\"" + num(x0 + plot_w + 8) + "\" y=\"" + num(legend_y + 40) + "\" width=\"10\" height=\"10\" fill=\"" +
           s.color + "\"/>\n";
    svg += "<text x=\"" + num(x0 + plot_w + 22) + "\" y=\"" + num(legend_y + 49) + "\" font-size=\"11\">" +
           escape(s.label) + "</text>\n";
    legend_y += 16;
  }
}

}  // namespace

std::string render_svg(const std::vector<Panel>& panels) {
  const double height = kPanelHeight * static_cast<double>(std::max<std::size_t>(1, panels.size()));
  std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(height) +
         "\" viewBox=\"0 0 " + num(kWidth) + " " + num(height) + "\" font-family=\"sans-serif\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) render_panel(svg, panels[i], kPanelHeight * static_cast<double>(i));
  svg += "</svg>\n";
  return svg;
}

}  // namespace bellkc::cli
