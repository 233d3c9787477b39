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

#ifndef TDULAB_METRICS_SVG_H_
#define TDULAB_METRICS_SVG_H_

#include <span>
#include <string>
#include <vector>

namespace tdulab {

// One curve aggregated across seeds. Every run must have one value per x.
struct CurveSeries {
  std::string label;
  std::vector<double> x;
  std::vector<std::vector<double>> runs;
};

struct SvgOptions {
  int width = 640;
  int height = 400;
  std::string title;
  std::string x_label = "episode";
  std::string y_label = "average regret";
  bool log_x = false;
};

// SVG 1.1 line plot of the per-x mean with a shaded band of one sample
// standard deviation. Throws std::invalid_argument on empty or ragged input.
std::string RenderSvgCurves(std::span<const CurveSeries> series,
                            const SvgOptions& options);
void WriteSvgCurves(std::span<const CurveSeries> series,
                    const SvgOptions& options, const std::string& path);

}  // namespace tdulab

#endif  // TDULAB_METRICS_SVG_H_
