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

#include "mvlda/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace mvlda {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

const char* color(std::size_t i) { return kPalette[i % (sizeof kPalette / sizeof kPalette[0])]; }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string tick(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  std::string s(buf);
  if (s == "-0") s = "0";
  return s;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo <= 0.0) {
      const double pad = std::abs(lo) > 0 ? 0.5 * std::abs(lo) : 0.5;
      lo -= pad;
      hi += pad;
    } else {
      const double pad = 0.05 * (hi - lo);
      lo -= pad;
      hi += pad;
    }
  }
};

class Canvas {
 public:
  Canvas(const Axes& axes, Range x, Range y) : axes_(axes), x_(x), y_(y) {
    os_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  }

  double px(double x) const { return kLeft + (x - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y_.lo) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom); }

  std::ostream& out() { return os_; }

  void frame() {
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kTop, y1 = kHeight - kBottom;
    os_ << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\"" << fmt(x1 - x0) << "\" height=\""
        << fmt(y1 - y0) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double xv = x_.lo + (x_.hi - x_.lo) * i / 4.0;
      const double yv = y_.lo + (y_.hi - y_.lo) * i / 4.0;
      os_ << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << fmt(y1 + 16) << "\" font-size=\"11\" text-anchor=\"middle\">"
          << tick(xv) << "</text>\n";
      os_ << "<text x=\"" << fmt(x0 - 6) << "\" y=\"" << fmt(py(yv) + 4) << "\" font-size=\"11\" text-anchor=\"end\">"
          << tick(yv) << "</text>\n";
    }
    if (y_.lo < 0.0 && y_.hi > 0.0) {
      os_ << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(py(0)) << "\" x2=\"" << fmt(x1) << "\" y2=\"" << fmt(py(0))
          << "\" stroke=\"#999999\" stroke-dasharray=\"4,3\"/>\n";
    }
    os_ << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">"
        << xml_escape(axes_.title) << "</text>\n";
    os_ << "<text x=\"" << fmt((x0 + x1) / 2) << "\" y=\"" << fmt(kHeight - 18)
        << "\" font-size=\"12\" text-anchor=\"middle\">" << xml_escape(axes_.x_label) << "</text>\n";
    os_ << "<text x=\"18\" y=\"" << fmt((y0 + y1) / 2) << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << fmt((y0 + y1) / 2) << ")\">" << xml_escape(axes_.y_label) << "</text>\n";
  }

  void legend(std::size_t slot, const std::string& name, const char* fill) {
    const double x = kWidth - kRight + 12;
    const double y = kTop + 10 + 18.0 * static_cast<double>(slot);
    os_ << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y - 8) << "\" width=\"10\" height=\"10\" fill=\"" << fill
        << "\"/>\n<text x=\"" << fmt(x + 16) << "\" y=\"" << fmt(y + 1) << "\" font-size=\"11\">" << xml_escape(name)
        << "</text>\n";
  }

  std::string finish() {
    os_ << "</svg>\n";
    return os_.str();
  }

 private:
  Axes axes_;
  Range x_;
  Range y_;
  std::ostringstream os_;
};

}  // namespace

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  if (s == "-0") s = "0";
  return s;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

std::string bar_chart_svg(const Axes& axes, const std::vector<double>& values, std::size_t highlight) {
  Range x, y;
  x.lo = 0.5;
  x.hi = static_cast<double>(std::max<std::size_t>(values.size(), 1)) + 0.5;
  y.add(0.0);
  for (double v : values) y.add(v);
  y.finish();
  Canvas canvas(axes, x, y);
  canvas.frame();
  const double width = 0.8 * (canvas.px(1.0) - canvas.px(0.0));
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double center = canvas.px(static_cast<double>(i + 1));
    const double top = canvas.py(std::max(values[i], 0.0));
    const double bottom = canvas.py(std::min(values[i], 0.0));
    canvas.out() << "<rect x=\"" << fmt(center - width / 2) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(width)
                 << "\" height=\"" << fmt(bottom - top) << "\" fill=\"" << (i + 1 == highlight ? color(1) : color(0))
                 << "\"/>\n";
  }
  if (highlight > 0) canvas.legend(0, "elbow", color(1));
  return canvas.finish();
}

std::string scatter_svg(const Axes& axes, const std::vector<PointGroup>& groups, const std::vector<Marker>& markers) {
  Range x, y;
  for (const auto& g : groups) {
    for (double v : g.x) x.add(v);
    for (double v : g.y) y.add(v);
  }
  for (const auto& m : markers) {
    x.add(m.x);
    y.add(m.y);
  }
  x.finish();
  y.finish();
  Canvas canvas(axes, x, y);
  canvas.frame();
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& g = groups[gi];
    for (std::size_t i = 0; i < g.x.size() && i < g.y.size(); ++i) {
      canvas.out() << "<circle cx=\"" << fmt(canvas.px(g.x[i])) << "\" cy=\"" << fmt(canvas.py(g.y[i]))
                   << "\" r=\"2.5\" fill=\"" << color(gi) << "\" fill-opacity=\"0.6\"/>\n";
      if (i < g.labels.size()) {
        canvas.out() << "<text x=\"" << fmt(canvas.px(g.x[i]) + 4) << "\" y=\"" << fmt(canvas.py(g.y[i]) - 4)
                     << "\" font-size=\"10\">" << xml_escape(g.labels[i]) << "</text>\n";
      }
    }
    canvas.legend(gi, g.name, color(gi));
  }
  for (std::size_t mi = 0; mi < markers.size(); ++mi) {
    const auto& m = markers[mi];
    const double cx = canvas.px(m.x), cy = canvas.py(m.y);
    canvas.out() << "<path d=\"M " << fmt(cx - 7) << " " << fmt(cy - 7) << " L " << fmt(cx + 7) << " " << fmt(cy + 7)
                 << " M " << fmt(cx - 7) << " " << fmt(cy + 7) << " L " << fmt(cx + 7) << " " << fmt(cy - 7)
                 << "\" stroke=\"" << color(mi) << "\" stroke-width=\"3\"/>\n"
                 << "<text x=\"" << fmt(cx + 9) << "\" y=\"" << fmt(cy - 9) << "\" font-size=\"11\" font-weight=\"bold\">"
                 << xml_escape(m.name) << "</text>\n";
  }
  return canvas.finish();
}

std::string line_chart_svg(const Axes& axes, const std::vector<double>& xs, const std::vector<Series>& series) {
  Range x, y;
  for (double v : xs) x.add(v);
  for (const auto& s : series)
    for (double v : s.y) y.add(v);
  x.finish();
  y.finish();
  Canvas canvas(axes, x, y);
  canvas.frame();
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    canvas.out() << "<polyline fill=\"none\" stroke=\"" << color(si) << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < xs.size() && i < s.y.size(); ++i) {
      if (i > 0) canvas.out() << " ";
      canvas.out() << fmt(canvas.px(xs[i])) << "," << fmt(canvas.py(s.y[i]));
    }
    canvas.out() << "\"/>\n";
    canvas.legend(si, s.name, color(si));
  }
  return canvas.finish();
}

}  // namespace mvlda
