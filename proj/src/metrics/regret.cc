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

#include "tdulab/metrics/regret.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tdulab {

RunMetrics MakeRunMetrics(double optimal_return, RegretOptions options) {
  if (!std::isfinite(optimal_return) ||
      (options.solve_reference && !std::isfinite(*options.solve_reference))) {
    throw std::invalid_argument("MakeRunMetrics: non-finite optimal return or solve reference");
  }
  if (options.window < 0) {
    throw std::invalid_argument("MakeRunMetrics: negative window");
  }
  RunMetrics metrics;
  metrics.optimal_return = optimal_return;
  metrics.options = options;
  return metrics;
}

void UpdateRegret(RunMetrics* metrics, double episode_return) {
  if (!std::isfinite(episode_return)) {
    throw std::invalid_argument("UpdateRegret: non-finite episode return");
  }
  metrics->regrets.push_back(metrics->optimal_return - episode_return);
  const int64_t n = metrics->num_episodes();
  const int64_t window = metrics->options.window;
  const int64_t first = (window > 0 && n > window) ? n - window : 0;
  // Summed fresh each time so the running value never drifts from a direct
  // recomputation.
  double sum = 0.0;
  for (int64_t i = first; i < n; ++i) sum += metrics->regrets[i];
  const double average = sum / static_cast<double>(n - first);
  metrics->average_regrets.push_back(average);
  const double offset =
      metrics->options.solve_reference
          ? *metrics->options.solve_reference - metrics->optimal_return
          : 0.0;
  if (!metrics->solve_episode &&
      average + offset < metrics->options.solve_threshold) {
    metrics->solve_episode = n;
  }
}

RunMetrics UpdateRegret(RunMetrics metrics, double episode_return,
                        double optimal_return) {
  if (metrics.regrets.empty()) metrics.optimal_return = optimal_return;
  if (optimal_return != metrics.optimal_return) {
    throw std::invalid_argument("UpdateRegret: optimal return changed");
  }
  UpdateRegret(&metrics, episode_return);
  return metrics;
}

bool SolvedUnderBudget(const SizeResult& result) {
  if (!result.solve_episode) return false;
  if (result.size >= 62) return true;
  return *result.solve_episode < (int64_t{1} << result.size);
}

double DeepSeaScore(std::span<const SizeResult> results) {
  if (results.empty()) return 0.0;
  int64_t solved = 0;
  for (const SizeResult& r : results) solved += SolvedUnderBudget(r) ? 1 : 0;
  return 100.0 * static_cast<double>(solved) /
         static_cast<double>(results.size());
}

MeanStd SampleMeanStd(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return out;
}

double Median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("Median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace tdulab
