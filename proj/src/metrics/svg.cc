// Copyright 2026 The tdulab Authors. All rights reserved.
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

#include "tdulab/metrics/svg.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "tdulab/metrics/csv.h"
#include "tdulab/metrics/regret.h"

namespace tdulab {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#ff7f0e", "#9467bd", "#8c564b",
                                    "#e377c2", "#7f7f7f"};
constexpr int kMarginLeft = 64;
constexpr int kMarginRight = 150;
constexpr int kMarginTop = 32;
constexpr int kMarginBottom = 48;

std::string Fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string Tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

std::string Escape(const std::string& s) {
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

struct Band {
  std::vector<double> mean;
  std::vector<double> stddev;
};

Band Aggregate(const CurveSeries& s) {
  Band band;
  std::vector<double> column(s.runs.size());
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    for (std::size_t r = 0; r < s.runs.size(); ++r) column[r] = s.runs[r][i];
    const MeanStd ms = SampleMeanStd(column);
    band.mean.push_back(ms.mean);
    band.stddev.push_back(ms.stddev);
  }
  return band;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void Add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void Pad() {
    if (hi - lo <= 0.0) {
      const double pad = lo == 0.0 ? 1.0 : 0.5 * std::abs(lo);
      lo -= pad;
      hi += pad;
    }
  }
};

}  // namespace

std::string RenderSvgCurves(std::span<const CurveSeries> series,
                            const SvgOptions& options) {
  if (series.empty()) {
    throw std::invalid_argument("RenderSvgCurves: no series");
  }
  const int plot_w = options.width - kMarginLeft - kMarginRight;
  const int plot_h = options.height - kMarginTop - kMarginBottom;
  if (plot_w <= 0 || plot_h <= 0) {
    throw std::invalid_argument("RenderSvgCurves: canvas too small");
  }
  std::vector<Band> bands;
  Range xr, yr;
  for (const CurveSeries& s : series) {
    if (s.x.empty() || s.runs.empty()) {
      throw std::invalid_argument("RenderSvgCurves: series '" + s.label +
                                  "' is empty");
    }
    for (const auto& run : s.runs) {
      if (run.size() != s.x.size()) {
        throw std::invalid_argument("RenderSvgCurves: series '" + s.label +
                                    "' has a run of the wrong length");
      }
    }
    for (double x : s.x) {
      if (options.log_x && x <= 0.0) {
        throw std::invalid_argument("RenderSvgCurves: log axis needs x > 0");
      }
      xr.Add(options.log_x ? std::log10(x) : x);
    }
    bands.push_back(Aggregate(s));
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      yr.Add(bands.back().mean[i] - bands.back().stddev[i]);
      yr.Add(bands.back().mean[i] + bands.back().stddev[i]);
    }
  }
  xr.Pad();
  yr.Pad();
  auto px = [&](double x) {
    const double t = options.log_x ? std::log10(x) : x;
    return kMarginLeft + (t - xr.lo) / (xr.hi - xr.lo) * plot_w;
  };
  auto py = [&](double y) {
    return kMarginTop + (yr.hi - y) / (yr.hi - yr.lo) * plot_h;
  };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         std::to_string(options.width) + "\" height=\"" +
         std::to_string(options.height) + "\" font-family=\"sans-serif\" "
         "font-size=\"11\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    svg += "<text x=\"" + std::to_string(kMarginLeft + plot_w / 2) +
           "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">" +
           Escape(options.title) + "</text>\n";
  }
  // Axes and ticks.
  const std::string x0 = Fixed(kMarginLeft);
  const std::string x1 = Fixed(kMarginLeft + plot_w);
  const std::string y0 = Fixed(kMarginTop + plot_h);
  const std::string y1 = Fixed(kMarginTop);
  svg += "<g stroke=\"black\" fill=\"none\">\n";
  svg += "<line x1=\"" + x0 + "\" y1=\"" + y0 + "\" x2=\"" + x1 + "\" y2=\"" +
         y0 + "\"/>\n";
  svg += "<line x1=\"" + x0 + "\" y1=\"" + y0 + "\" x2=\"" + x0 + "\" y2=\"" +
         y1 + "\"/>\n";
  svg += "</g>\n";
  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double tx = xr.lo + (xr.hi - xr.lo) * i / kTicks;
    const double xv = options.log_x ? std::pow(10.0, tx) : tx;
    const std::string x = Fixed(kMarginLeft + static_cast<double>(plot_w) * i /
                                                  kTicks);
    svg += "<line x1=\"" + x + "\" y1=\"" + y0 + "\" x2=\"" + x + "\" y2=\"" +
           Fixed(kMarginTop + plot_h + 4) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + x + "\" y=\"" + Fixed(kMarginTop + plot_h + 16) +
           "\" text-anchor=\"middle\">" + Tick(xv) + "</text>\n";
    const double yv = yr.lo + (yr.hi - yr.lo) * i / kTicks;
    const std::string y = Fixed(py(yv));
    svg += "<line x1=\"" + Fixed(kMarginLeft - 4) + "\" y1=\"" + y +
           "\" x2=\"" + x0 + "\" y2=\"" + y + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + Fixed(kMarginLeft - 6) + "\" y=\"" +
           Fixed(py(yv) + 4) + "\" text-anchor=\"end\">" + Tick(yv) +
           "</text>\n";
  }
  svg += "<text x=\"" + std::to_string(kMarginLeft + plot_w / 2) + "\" y=\"" +
         std::to_string(options.height - 10) + "\" text-anchor=\"middle\">" +
         Escape(options.x_label) + "</text>\n";
  svg += "<text transform=\"translate(16," +
         std::to_string(kMarginTop + plot_h / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">" + Escape(options.y_label) +
         "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const CurveSeries& s = series[k];
    const Band& band = bands[k];
    const std::string color = kPalette[k % std::size(kPalette)];
    bool has_spread = false;
    for (double sd : band.stddev) has_spread |= sd > 0.0;
    if (has_spread) {
      std::string points;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        points += Fixed(px(s.x[i])) + "," +
                  Fixed(py(band.mean[i] + band.stddev[i])) + " ";
      }
      for (std::size_t i = s.x.size(); i-- > 0;) {
        points += Fixed(px(s.x[i])) + "," +
                  Fixed(py(band.mean[i] - band.stddev[i])) + " ";
      }
      points.pop_back();
      svg += "<polygon points=\"" + points + "\" fill=\"" + color +
             "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    }
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      points += Fixed(px(s.x[i])) + "," + Fixed(py(band.mean[i])) + " ";
    }
    points.pop_back();
    svg += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"" +
           color + "\" stroke-width=\"1.5\"/>\n";
    const int ly = kMarginTop + 8 + 18 * static_cast<int>(k);
    const int lx = kMarginLeft + plot_w + 12;
    svg += "<line x1=\"" + std::to_string(lx) + "\" y1=\"" +
           std::to_string(ly) + "\" x2=\"" + std::to_string(lx + 20) +
           "\" y2=\"" + std::to_string(ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + std::to_string(lx + 26) + "\" y=\"" +
           std::to_string(ly + 4) + "\">" + Escape(s.label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void WriteSvgCurves(std::span<const CurveSeries> series,
                    const SvgOptions& options, const std::string& path) {
  WriteTextFile(path, RenderSvgCurves(series, options));
}

}  // namespace tdulab
