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

#ifndef TDULAB_CLI_EXPERIMENT_H_
#define TDULAB_CLI_EXPERIMENT_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tdulab/agents/config.h"
#include "tdulab/agents/loss.h"
#include "tdulab/cli/config.h"
#include "tdulab/metrics/csv.h"
#include "tdulab/metrics/regret.h"

namespace tdulab {

// Environment variable naming the directory that experiment outputs go under
// when the config does not set experiment.output_dir.
inline constexpr const char* kOutputRootEnv = "TDULAB_OUTPUT_ROOT";

// Returns $TDULAB_OUTPUT_ROOT, or "tdulab_out" when unset.
std::string OutputRoot();

struct RunSpec {
  std::string run_id;
  EnvKind env = EnvKind::kDeepSea;
  bool stochastic = false;
  int size = 0;
  uint64_t seed = 0;
  TduConfig agent;
  int64_t budget = 0;
  bool stop_on_solve = false;
  RegretOptions regret;
  int retain_episodes = 100;
  Execution kernel = Execution::kSerial;
};

struct RunResult {
  RunSpec spec;
  std::vector<EpisodeRow> rows;
  RunMetrics metrics;
  // Deep Sea: first episode with average regret below the threshold. Tree:
  // first episode of the first run of `retain_episodes` consecutive exploit
  // returns of 1.
  std::optional<int64_t> solve_episode;
  std::optional<int64_t> first_reward_episode;
  bool solved_under_budget = false;
  // Unsolved, and the budget was cut below 2^N by the ceiling.
  bool censored = false;
  int64_t episodes_run = 0;
  int64_t total_steps = 0;
  int64_t sgd_steps = 0;
  std::string error;  // non-empty when the run threw

  bool ok() const { return error.empty(); }
};

// Deep Sea: min(2^size, ceiling). Tree: ceiling.
int64_t EpisodeBudget(EnvKind env, int size, int64_t ceiling);

// Validates, then expands variants x betas x prior scales x sizes x seeds in
// that nesting order.
std::vector<RunSpec> ExpandRuns(const ExperimentConfig& config);

// Deterministic given `spec` alone. Never throws; failures land in `error`.
RunResult ExecuteRun(const RunSpec& spec);

using RunCallback = std::function<void(const RunResult&)>;

// Runs every spec on a pool of `workers` threads. Results come back in spec
// order regardless of scheduling. The callback is serialized.
std::vector<RunResult> ExecuteRuns(const std::vector<RunSpec>& specs,
                                   int workers,
                                   const RunCallback& on_done = nullptr);

// One line per run in summary.csv. Column order:
//   run_id, seed, env, N_or_L, variant, beta, lambda, budget, episodes_run,
//   solve_episode, solved_under_budget, censored, first_reward_episode,
//   total_steps, sgd_steps
// Unset episodes are written as empty fields.
struct SummaryRow {
  std::string run_id;
  uint64_t seed = 0;
  std::string env;
  int size = 0;
  std::string variant;
  double beta = 0.0;
  double lambda = 0.0;
  int64_t budget = 0;
  int64_t episodes_run = 0;
  std::optional<int64_t> solve_episode;
  bool solved_under_budget = false;
  bool censored = false;
  std::optional<int64_t> first_reward_episode;
  int64_t total_steps = 0;
  int64_t sgd_steps = 0;

  bool operator==(const SummaryRow&) const = default;
};

SummaryRow Summarize(const RunResult& result);
void WriteSummaryCsv(const std::vector<SummaryRow>& rows, std::ostream& out);
std::vector<SummaryRow> ParseSummaryCsv(std::string_view text);

// Deep Sea score per (env, variant, beta, lambda, seed) over the sizes run,
// plus a mean over seeds written with seed "mean". Column order:
//   env, variant, beta, lambda, seed, num_sizes, score
void WriteScoreCsv(const std::vector<SummaryRow>& rows, std::ostream& out);

// Mean and sample std of the average regret per episode across seeds.
// Column order: env, N_or_L, variant, beta, lambda, episode, num_seeds,
// mean_avg_regret, std_avg_regret
void WriteAggregateCsv(const std::vector<EpisodeRow>& rows, std::ostream& out);

// One SVG per (env, size) under `dir`, one curve per (variant, beta,
// lambda); each curve is cut to its shortest seed. Returns the paths written.
std::vector<std::string> WriteCurvePlots(const std::vector<EpisodeRow>& rows,
                                         const std::string& dir);

// Runs the sweep and writes, under the output directory:
//   config.ini, runs/<run_id>.csv, aggregate.csv, summary.csv, score.csv,
//   curves_<env>_<size>.svg
// Returns 0 when every run completed and 1 otherwise. Progress goes to `log`.
int RunSweep(const ExperimentConfig& config, std::ostream& log);

std::string ResolveOutputDir(const ExperimentConfig& config);

}  // namespace tdulab

#endif  // TDULAB_CLI_EXPERIMENT_H_
