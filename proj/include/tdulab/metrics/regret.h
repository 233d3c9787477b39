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

#ifndef TDULAB_METRICS_REGRET_H_
#define TDULAB_METRICS_REGRET_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace tdulab {

struct EpisodeLog {
  int64_t episode = 0;  // 1-based
  double episode_return = 0.0;
  int head = 0;
  int length = 0;
};

struct RegretOptions {
  double solve_threshold = 0.9;
  // 0 averages over every episode so far; a positive value averages over the
  // most recent `window` episodes.
  int64_t window = 0;
  // Return the solve rule measures the shortfall against. Unset uses the
  // optimal return. Stochastic Deep Sea sets the noise-free optimum here,
  // since its exact optimum is far below the threshold scale.
  std::optional<double> solve_reference;
};

// Per-episode regret accounting for one run.
struct RunMetrics {
  double optimal_return = 0.0;
  RegretOptions options;
  std::vector<double> regrets;
  std::vector<double> average_regrets;
  // 1-based episode at which the average shortfall against the solve
  // reference first fell below the threshold.
  std::optional<int64_t> solve_episode;

  int64_t num_episodes() const {
    return static_cast<int64_t>(regrets.size());
  }
  bool solved() const { return solve_episode.has_value(); }
};

RunMetrics MakeRunMetrics(double optimal_return, RegretOptions options = {});

// Appends `optimal_return - episode_return` and updates the running average.
// Throws std::invalid_argument on a non-finite return.
void UpdateRegret(RunMetrics* metrics, double episode_return);
RunMetrics UpdateRegret(RunMetrics metrics, double episode_return,
                        double optimal_return);

// Deep Sea solves within `2^size` episodes.
struct SizeResult {
  int size = 0;
  std::optional<int64_t> solve_episode;
};

bool SolvedUnderBudget(const SizeResult& result);

// Percentage of sizes whose solve episode is below 2^size. Empty input → 0.
double DeepSeaScore(std::span<const SizeResult> results);

// Mean and sample standard deviation (n-1); std is 0 for fewer than two
// values.
struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};
MeanStd SampleMeanStd(std::span<const double> values);

double Median(std::vector<double> values);

}  // namespace tdulab

#endif  // TDULAB_METRICS_REGRET_H_
