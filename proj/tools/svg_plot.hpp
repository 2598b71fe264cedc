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

#pragma once

// Minimal self-contained SVG line/scatter plots: stacked panels with axes,
// ticks, labelled horizontal reference lines, curves and points with error
// bars.

#include <string>
#include <vector>

namespace bellkc::cli {

struct Series {
  std::string label;
  std::string color = "#1f77b4";
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;  // optional, same length as y
  bool as_points = false;
};

struct ReferenceLine {
  double y = 0.0;
  std::string label;
  std::string color = "#888888";
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = -1.0;
  double y_max = 1.0;
  std::vector<Series> series;
  std::vector<ReferenceLine> references;
};

std::string render_svg(const std::vector<Panel>& panels);

}  // namespace bellkc::cli
