// Copyright 2026 The hsched Authors
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

#ifndef HSCHED_SVG_HPP_
#define HSCHED_SVG_HPP_

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hsched/common.hpp"

namespace hsched {

/// Minimal vector-graphic rendering for the batch reports: one polyline or
/// point series per entry, shared axes, no interactivity. Data files carry
/// the truth; these are quick-look companions.
struct SvgSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
  bool line = true;
};

inline std::string svg_chart(const std::string& title,
                             const std::string& x_label,
                             const std::string& y_label,
                             const std::vector<SvgSeries>& series) {
  const double width = 640, height = 400;
  const double left = 60, right = 20, top = 36, bottom = 44;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const SvgSeries& s : series) {
    for (auto [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (first) {
        xmin = xmax = x;
        ymin = ymax = y;
        first = false;
      } else {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  auto sx = [&](double x) {
    return left + (x - xmin) / (xmax - xmin) * (width - left - right);
  };
  auto sy = [&](double y) {
    return height - bottom - (y - ymin) / (ymax - ymin) * (height - top - bottom);
  };
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                  "#ff7f0e", "#9467bd", "#8c564b"};

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         fmt_double(width) + "\" height=\"" + fmt_double(height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + fmt_double(width / 2) +
         "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" + title +
         "</text>\n";
  // Axes with min/max tick labels.
  out += "<line x1=\"" + fmt_double(left) + "\" y1=\"" + fmt_double(top) +
         "\" x2=\"" + fmt_double(left) + "\" y2=\"" +
         fmt_double(height - bottom) + "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + fmt_double(left) + "\" y1=\"" +
         fmt_double(height - bottom) + "\" x2=\"" + fmt_double(width - right) +
         "\" y2=\"" + fmt_double(height - bottom) + "\" stroke=\"black\"/>\n";
  auto tick = [&](double x, double y, const std::string& text,
                  const char* anchor) {
    out += "<text x=\"" + fmt_double(x) + "\" y=\"" + fmt_double(y) +
           "\" text-anchor=\"" + anchor + "\" font-size=\"10\">" + text +
           "</text>\n";
  };
  tick(left - 6, height - bottom + 4, fmt_double(ymin), "end");
  tick(left - 6, top + 8, fmt_double(ymax), "end");
  tick(left, height - bottom + 16, fmt_double(xmin), "middle");
  tick(width - right, height - bottom + 16, fmt_double(xmax), "middle");
  tick(width / 2, height - 8, x_label, "middle");
  out += "<text x=\"14\" y=\"" + fmt_double(height / 2) +
         "\" text-anchor=\"middle\" font-size=\"10\" transform=\"rotate(-90 "
         "14 " +
         fmt_double(height / 2) + ")\">" + y_label + "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = palette[k % 6];
    const SvgSeries& s = series[k];
    if (s.line && s.points.size() > 1) {
      std::string pts;
      for (auto [x, y] : s.points) {
        pts += fmt_double(sx(x)) + "," + fmt_double(sy(y)) + " ";
      }
      out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
             "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    }
    for (auto [x, y] : s.points) {
      out += "<circle cx=\"" + fmt_double(sx(x)) + "\" cy=\"" +
             fmt_double(sy(y)) + "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
    }
    double ly = top + 14.0 * static_cast<double>(k);
    out += "<rect x=\"" + fmt_double(width - right - 130) + "\" y=\"" +
           fmt_double(ly) + "\" width=\"10\" height=\"10\" fill=\"" + color +
           "\"/>\n";
    tick(width - right - 116, ly + 9, s.name, "start");
  }
  out += "</svg>\n";
  return out;
}

/// Histogram rendering: bars over [lo, hi) bins.
inline std::string svg_histogram(const std::string& title,
                                 const std::string& x_label,
                                 const std::vector<double>& bin_edges,
                                 const std::vector<long>& counts,
                                 double shade_from = -1.0) {
  const double width = 640, height = 400;
  const double left = 60, right = 20, top = 36, bottom = 44;
  long cmax = 1;
  for (long c : counts) cmax = std::max(cmax, c);
  double xmin = bin_edges.front(), xmax = bin_edges.back();
  auto sx = [&](double x) {
    return left + (x - xmin) / (xmax - xmin) * (width - left - right);
  };
  auto sy = [&](double c) {
    return height - bottom - c / static_cast<double>(cmax) *
                                 (height - top - bottom);
  };
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         fmt_double(width) + "\" height=\"" + fmt_double(height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + fmt_double(width / 2) +
         "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" + title +
         "</text>\n";
  if (shade_from >= xmin && shade_from <= xmax) {
    out += "<rect x=\"" + fmt_double(sx(shade_from)) + "\" y=\"" +
           fmt_double(top) + "\" width=\"" +
           fmt_double(sx(xmax) - sx(shade_from)) + "\" height=\"" +
           fmt_double(height - top - bottom) +
           "\" fill=\"#ffe28a\" opacity=\"0.6\"/>\n";
  }
  for (std::size_t k = 0; k < counts.size(); ++k) {
    double x0 = sx(bin_edges[k]);
    double x1 = sx(bin_edges[k + 1]);
    out += "<rect x=\"" + fmt_double(x0) + "\" y=\"" +
           fmt_double(sy(static_cast<double>(counts[k]))) + "\" width=\"" +
           fmt_double(std::max(0.5, x1 - x0 - 0.5)) + "\" height=\"" +
           fmt_double(height - bottom - sy(static_cast<double>(counts[k]))) +
           "\" fill=\"#1f77b4\"/>\n";
  }
  out += "<line x1=\"" + fmt_double(left) + "\" y1=\"" +
         fmt_double(height - bottom) + "\" x2=\"" + fmt_double(width - right) +
         "\" y2=\"" + fmt_double(height - bottom) + "\" stroke=\"black\"/>\n";
  out += "<text x=\"" + fmt_double(width / 2) + "\" y=\"" +
         fmt_double(height - 8) + "\" text-anchor=\"middle\" font-size=\"10\">" +
         x_label + "</text>\n";
  out += "<text x=\"" + fmt_double(left) + "\" y=\"" +
         fmt_double(height - bottom + 16) +
         "\" text-anchor=\"middle\" font-size=\"10\">" + fmt_double(xmin) +
         "</text>\n";
  out += "<text x=\"" + fmt_double(width - right) + "\" y=\"" +
         fmt_double(height - bottom + 16) +
         "\" text-anchor=\"middle\" font-size=\"10\">" + fmt_double(xmax) +
         "</text>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace hsched

#endif  // HSCHED_SVG_HPP_
