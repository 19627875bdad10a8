// Copyright 2026 The mvlda Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Static SVG charts (bar, scatter, line) and CSV number formatting.
// Output depends only on the inputs, so repeated runs are byte-identical.

#pragma once

#include <string>
#include <vector>

namespace mvlda {

/// %.17g, with "-0" normalized to "0".
std::string format_number(double x);

std::string xml_escape(const std::string& s);

struct Axes {
  std::string title;
  std::string x_label;
  std::string y_label;
};

struct PointGroup {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<std::string> labels;  // optional per-point text
};

struct Marker {
  std::string name;
  double x = 0.0;
  double y = 0.0;
};

struct Series {
  std::string name;
  std::vector<double> y;
};

/// Bars for values[i] at category i+1; `highlight` (1-based, 0 = none) is
/// drawn in a second color.
std::string bar_chart_svg(const Axes& axes, const std::vector<double>& values, std::size_t highlight = 0);

std::string scatter_svg(const Axes& axes, const std::vector<PointGroup>& groups,
                        const std::vector<Marker>& markers = {});

std::string line_chart_svg(const Axes& axes, const std::vector<double>& x, const std::vector<Series>& series);

}  // namespace mvlda
