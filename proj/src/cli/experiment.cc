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

#include "tdulab/cli/experiment.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "tdulab/agents/agent.h"
#include "tdulab/envs/binary_tree.h"
#include "tdulab/envs/deep_sea.h"
#include "tdulab/metrics/svg.h"
#include "tdulab/nn/rng.h"

namespace tdulab {
namespace {

std::string Short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string OptionalInt(const std::optional<int64_t>& v) {
  return v ? std::to_string(*v) : std::string();
}

std::optional<int64_t> ParseOptionalInt(const std::string& field) {
  if (field.empty()) return std::nullopt;
  return ParseInt(field);
}

bool ParseFlag(const std::string& field) {
  if (field == "1") return true;
  if (field == "0") return false;
  throw std::invalid_argument("expected 0 or 1, got '" + field + "'");
}

std::unique_ptr<Environment> MakeEnvironment(const RunSpec& spec,
                                             const RngStream& root) {
  if (spec.env == EnvKind::kBinaryTree) {
    return std::make_unique<BinaryTreeEnv>(spec.size, root.Split("env_map"));
  }
  return std::make_unique<DeepSeaEnv>(spec.size, spec.stochastic,
                                      root.Split("env_map"),
                                      root.Split("env_dynamics"));
}

// Key that groups seeds of one configuration.
using GroupKey = std::tuple<std::string, int, std::string, double, double>;

GroupKey KeyOf(const EpisodeRow& r) {
  return {r.env, r.size, r.variant, r.beta, r.lambda};
}

}  // namespace

std::string OutputRoot() {
  const char* root = std::getenv(kOutputRootEnv);
  return (root != nullptr && root[0] != '\0') ? root : "tdulab_out";
}

std::string ResolveOutputDir(const ExperimentConfig& config) {
  if (!config.output_dir.empty()) return config.output_dir;
  return OutputRoot() + "/" + config.name;
}

int64_t EpisodeBudget(EnvKind env, int size, int64_t ceiling) {
  if (env == EnvKind::kBinaryTree || size >= 62) return ceiling;
  return std::min(int64_t{1} << size, ceiling);
}

std::vector<RunSpec> ExpandRuns(const ExperimentConfig& config) {
  config.Validate();
  const std::vector<Variant> variants =
      config.sweep_variants.empty() ? std::vector<Variant>{config.agent.variant}
                                    : config.sweep_variants;
  const std::vector<double> betas =
      config.sweep_betas.empty() ? std::vector<double>{config.agent.beta}
                                 : config.sweep_betas;
  const std::vector<double> lambdas =
      config.sweep_prior_scales.empty()
          ? std::vector<double>{config.agent.prior_scale}
          : config.sweep_prior_scales;
  std::vector<RunSpec> specs;
  for (Variant variant : variants) {
    for (double beta : betas) {
      for (double lambda : lambdas) {
        for (int size : config.sizes) {
          for (uint64_t seed : config.seeds) {
            RunSpec spec;
            spec.env = config.env;
            spec.stochastic = config.stochastic;
            spec.size = size;
            spec.seed = seed;
            spec.agent = config.agent;
            spec.agent.variant = variant;
            spec.agent.beta = beta;
            spec.agent.prior_scale = lambda;
            try {
              spec.agent.Validate();
            } catch (const std::invalid_argument& e) {
              throw ConfigError(std::string("agent: ") + e.what());
            }
            spec.budget =
                EpisodeBudget(config.env, size, config.episode_ceiling);
            spec.stop_on_solve = config.stop_on_solve;
            spec.regret.solve_threshold = config.solve_threshold;
            spec.regret.window = config.regret_window;
            if (config.env == EnvKind::kDeepSea && config.stochastic) {
              spec.regret.solve_reference = DeepSeaOptimalReturn(size, false);
            }
            spec.retain_episodes = config.retain_episodes;
            spec.kernel = config.kernel;
            spec.run_id = VariantName(variant) + "_" +
                          EnvKindName(config.env, config.stochastic) + "_" +
                          std::to_string(size) + "_b" + Short(beta) + "_l" +
                          Short(lambda) + "_s" + std::to_string(seed);
            specs.push_back(std::move(spec));
          }
        }
      }
    }
  }
  return specs;
}

RunResult ExecuteRun(const RunSpec& spec) {
  RunResult result;
  result.spec = spec;
  try {
    const RngStream root(spec.seed);
    std::unique_ptr<Environment> env = MakeEnvironment(spec, root);
    Agent agent(spec.agent, env->observation_size(), env->num_actions(),
                root.Split("agent"), spec.kernel);
    result.metrics = MakeRunMetrics(env->OptimalReturn(), spec.regret);
    const bool tree = spec.env == EnvKind::kBinaryTree;
    const std::string env_name = env->name();
    const std::string variant = VariantName(spec.agent.variant);
    int64_t streak = 0;
    for (int64_t episode = 1; episode <= spec.budget; ++episode) {
      const EpisodeOutcome outcome = RunEpisode(agent, *env);
      UpdateRegret(&result.metrics, outcome.episode_return);
      result.episodes_run = episode;
      if (!result.first_reward_episode && outcome.episode_return > 0.5) {
        result.first_reward_episode = episode;
      }
      EpisodeRow row;
      row.run_id = spec.run_id;
      row.seed = spec.seed;
      row.env = env_name;
      row.size = spec.size;
      row.episode = episode;
      row.episode_return = outcome.episode_return;
      row.regret = result.metrics.regrets.back();
      row.average_regret = result.metrics.average_regrets.back();
      row.head = outcome.head;
      row.beta = spec.agent.beta;
      row.lambda = spec.agent.prior_scale;
      row.variant = variant;
      result.rows.push_back(std::move(row));

      if (tree) {
        streak = EvaluateExploit(agent, *env) == 1.0 ? streak + 1 : 0;
        if (!result.solve_episode && streak == spec.retain_episodes) {
          result.solve_episode = episode - spec.retain_episodes + 1;
        }
      } else if (!result.solve_episode && result.metrics.solve_episode) {
        result.solve_episode = result.metrics.solve_episode;
      }
      if (spec.stop_on_solve && result.solve_episode) break;
    }
    result.total_steps = agent.total_steps();
    result.sgd_steps = agent.sgd_steps();
    if (tree) {
      result.solved_under_budget = result.solve_episode.has_value();
      result.censored = !result.solved_under_budget;
    } else {
      result.solved_under_budget =
          SolvedUnderBudget({spec.size, result.solve_episode});
      const int64_t full = EpisodeBudget(spec.env, spec.size, INT64_MAX);
      result.censored = !result.solved_under_budget && spec.budget < full;
    }
  } catch (const std::exception& e) {
    result.error = e.what();
  }
  return result;
}

std::vector<RunResult> ExecuteRuns(const std::vector<RunSpec>& specs,
                                   int workers, const RunCallback& on_done) {
  std::vector<RunResult> results(specs.size());
  std::atomic<std::size_t> next{0};
  std::mutex callback_mutex;
  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= specs.size()) return;
      results[i] = ExecuteRun(specs[i]);
      if (on_done) {
        std::lock_guard<std::mutex> lock(callback_mutex);
        on_done(results[i]);
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(specs.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  return results;
}

SummaryRow Summarize(const RunResult& r) {
  SummaryRow s;
  s.run_id = r.spec.run_id;
  s.seed = r.spec.seed;
  s.env = EnvKindName(r.spec.env, r.spec.stochastic);
  s.size = r.spec.size;
  s.variant = VariantName(r.spec.agent.variant);
  s.beta = r.spec.agent.beta;
  s.lambda = r.spec.agent.prior_scale;
  s.budget = r.spec.budget;
  s.episodes_run = r.episodes_run;
  s.solve_episode = r.solve_episode;
  s.solved_under_budget = r.solved_under_budget;
  s.censored = r.censored;
  s.first_reward_episode = r.first_reward_episode;
  s.total_steps = r.total_steps;
  s.sgd_steps = r.sgd_steps;
  return s;
}

namespace {

const std::vector<std::string>& SummaryHeader() {
  static const std::vector<std::string> header = {
      "run_id",       "seed",          "env",
      "N_or_L",       "variant",       "beta",
      "lambda",       "budget",        "episodes_run",
      "solve_episode", "solved_under_budget", "censored",
      "first_reward_episode", "total_steps", "sgd_steps"};
  return header;
}

}  // namespace

void WriteSummaryCsv(const std::vector<SummaryRow>& rows, std::ostream& out) {
  CsvWriter writer(out);
  writer.WriteRow(SummaryHeader());
  for (const SummaryRow& s : rows) {
    writer.WriteRow({s.run_id, std::to_string(s.seed), s.env,
                     std::to_string(s.size), s.variant, FormatDouble(s.beta),
                     FormatDouble(s.lambda), std::to_string(s.budget),
                     std::to_string(s.episodes_run),
                     OptionalInt(s.solve_episode),
                     s.solved_under_budget ? "1" : "0", s.censored ? "1" : "0",
                     OptionalInt(s.first_reward_episode),
                     std::to_string(s.total_steps),
                     std::to_string(s.sgd_steps)});
  }
}

std::vector<SummaryRow> ParseSummaryCsv(std::string_view text) {
  const std::vector<CsvRow> rows = ParseCsv(text);
  if (rows.empty() || rows.front() != SummaryHeader()) {
    throw std::invalid_argument("summary CSV: missing or wrong header");
  }
  std::vector<SummaryRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const CsvRow& f = rows[i];
    if (f.size() != SummaryHeader().size()) {
      throw std::invalid_argument("summary CSV: row " + std::to_string(i) +
                                  " has the wrong field count");
    }
    SummaryRow s;
    s.run_id = f[0];
    s.seed = static_cast<uint64_t>(std::stoull(f[1]));
    s.env = f[2];
    s.size = static_cast<int>(ParseInt(f[3]));
    s.variant = f[4];
    s.beta = ParseDouble(f[5]);
    s.lambda = ParseDouble(f[6]);
    s.budget = ParseInt(f[7]);
    s.episodes_run = ParseInt(f[8]);
    s.solve_episode = ParseOptionalInt(f[9]);
    s.solved_under_budget = ParseFlag(f[10]);
    s.censored = ParseFlag(f[11]);
    s.first_reward_episode = ParseOptionalInt(f[12]);
    s.total_steps = ParseInt(f[13]);
    s.sgd_steps = ParseInt(f[14]);
    out.push_back(std::move(s));
  }
  return out;
}

void WriteScoreCsv(const std::vector<SummaryRow>& rows, std::ostream& out) {
  // solved_under_budget already applies the 2^N rule for Deep Sea and the
  // retention rule for trees, so the score is the solved fraction.
  using Config = std::tuple<std::string, std::string, double, double>;
  std::map<Config, std::map<uint64_t, std::vector<bool>>> groups;
  for (const SummaryRow& s : rows) {
    groups[{s.env, s.variant, s.beta, s.lambda}][s.seed].push_back(
        s.solved_under_budget);
  }
  CsvWriter writer(out);
  writer.WriteRow({"env", "variant", "beta", "lambda", "seed", "num_sizes",
                   "score"});
  for (const auto& [key, seeds] : groups) {
    const auto& [env, variant, beta, lambda] = key;
    std::vector<double> scores;
    for (const auto& [seed, solved] : seeds) {
      const double score =
          100.0 * static_cast<double>(std::count(solved.begin(), solved.end(),
                                                 true)) /
          static_cast<double>(solved.size());
      scores.push_back(score);
      writer.WriteRow({env, variant, FormatDouble(beta), FormatDouble(lambda),
                       std::to_string(seed), std::to_string(solved.size()),
                       FormatDouble(score)});
    }
    writer.WriteRow({env, variant, FormatDouble(beta), FormatDouble(lambda),
                     "mean", std::to_string(seeds.begin()->second.size()),
                     FormatDouble(SampleMeanStd(scores).mean)});
  }
}

void WriteAggregateCsv(const std::vector<EpisodeRow>& rows,
                       std::ostream& out) {
  std::map<GroupKey, std::map<int64_t, std::vector<double>>> groups;
  for (const EpisodeRow& r : rows) {
    groups[KeyOf(r)][r.episode].push_back(r.average_regret);
  }
  CsvWriter writer(out);
  writer.WriteRow({"env", "N_or_L", "variant", "beta", "lambda", "episode",
                   "num_seeds", "mean_avg_regret", "std_avg_regret"});
  for (const auto& [key, episodes] : groups) {
    const auto& [env, size, variant, beta, lambda] = key;
    for (const auto& [episode, values] : episodes) {
      const MeanStd ms = SampleMeanStd(values);
      writer.WriteRow({env, std::to_string(size), variant, FormatDouble(beta),
                       FormatDouble(lambda), std::to_string(episode),
                       std::to_string(values.size()), FormatDouble(ms.mean),
                       FormatDouble(ms.stddev)});
    }
  }
}

std::vector<std::string> WriteCurvePlots(const std::vector<EpisodeRow>& rows,
                                         const std::string& dir) {
  // (env, size) -> (variant, beta, lambda) -> run_id -> average regrets.
  using Series = std::tuple<std::string, double, double>;
  std::map<std::pair<std::string, int>,
           std::map<Series, std::map<std::string, std::vector<double>>>>
      plots;
  for (const EpisodeRow& r : rows) {
    plots[{r.env, r.size}][{r.variant, r.beta, r.lambda}][r.run_id].push_back(
        r.average_regret);
  }
  std::vector<std::string> paths;
  for (const auto& [plot_key, series_map] : plots) {
    std::vector<CurveSeries> series;
    for (const auto& [skey, runs] : series_map) {
      std::size_t length = SIZE_MAX;
      for (const auto& [id, values] : runs) length = std::min(length, values.size());
      CurveSeries s;
      s.label = std::get<0>(skey) + " b=" + Short(std::get<1>(skey)) +
                " l=" + Short(std::get<2>(skey));
      for (std::size_t i = 0; i < length; ++i) s.x.push_back(double(i + 1));
      for (const auto& [id, values] : runs) {
        s.runs.emplace_back(values.begin(), values.begin() + length);
      }
      series.push_back(std::move(s));
    }
    SvgOptions options;
    options.title = plot_key.first + " size " + std::to_string(plot_key.second);
    const std::string path = dir + "/curves_" + plot_key.first + "_" +
                             std::to_string(plot_key.second) + ".svg";
    WriteSvgCurves(series, options, path);
    paths.push_back(path);
  }
  return paths;
}

int RunSweep(const ExperimentConfig& config, std::ostream& log) {
  const std::vector<RunSpec> specs = ExpandRuns(config);
  const std::string dir = ResolveOutputDir(config);
  WriteTextFile(dir + "/config.ini", SerializeConfig(config));
  log << "running " << specs.size() << " run(s) on " << config.workers
      << " worker(s); output in " << dir << "\n";
  const std::vector<RunResult> results =
      ExecuteRuns(specs, config.workers, [&](const RunResult& r) {
        log << r.spec.run_id << ": ";
        if (!r.ok()) {
          log << "FAILED: " << r.error << "\n";
        } else if (r.solve_episode) {
          log << "solved at episode " << *r.solve_episode << " ("
              << r.episodes_run << " episodes run)\n";
        } else {
          log << "not solved in " << r.episodes_run << " episodes\n";
        }
        log.flush();
      });
  int status = 0;
  std::vector<EpisodeRow> all_rows;
  std::vector<SummaryRow> summary;
  for (const RunResult& r : results) {
    if (!r.ok()) {
      status = 1;
      continue;
    }
    std::ostringstream csv;
    WriteEpisodeCsv(r.rows, csv);
    WriteTextFile(dir + "/runs/" + r.spec.run_id + ".csv", csv.str());
    all_rows.insert(all_rows.end(), r.rows.begin(), r.rows.end());
    summary.push_back(Summarize(r));
  }
  std::ostringstream aggregate, summary_csv, score;
  WriteAggregateCsv(all_rows, aggregate);
  WriteSummaryCsv(summary, summary_csv);
  WriteScoreCsv(summary, score);
  WriteTextFile(dir + "/aggregate.csv", aggregate.str());
  WriteTextFile(dir + "/summary.csv", summary_csv.str());
  WriteTextFile(dir + "/score.csv", score.str());
  if (!all_rows.empty()) WriteCurvePlots(all_rows, dir);
  return status;
}

}  // namespace tdulab
