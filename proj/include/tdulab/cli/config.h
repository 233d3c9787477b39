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

#ifndef TDULAB_CLI_CONFIG_H_
#define TDULAB_CLI_CONFIG_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tdulab/agents/config.h"
#include "tdulab/agents/loss.h"

namespace tdulab {

// Raised for any configuration problem; the CLI maps it to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class EnvKind { kDeepSea, kBinaryTree };

std::string EnvKindName(EnvKind kind, bool stochastic);

struct ExperimentConfig {
  std::string name = "experiment";
  std::string output_dir;  // empty: <output root>/<name>

  EnvKind env = EnvKind::kDeepSea;
  bool stochastic = false;
  std::vector<int> sizes = {10};  // Deep Sea N or tree depth L

  TduConfig agent;

  std::vector<uint64_t> seeds = {1};
  // Deep Sea runs last min(2^N, episode_ceiling) episodes; tree runs last
  // episode_ceiling episodes.
  int64_t episode_ceiling = 10000;
  bool stop_on_solve = false;
  double solve_threshold = 0.9;
  int64_t regret_window = 0;
  // Tree runs count as solved once the exploit policy returns 1 for this many
  // consecutive episodes.
  int retain_episodes = 100;
  int workers = 1;
  Execution kernel = Execution::kSerial;

  // Sweep axes; empty means "use the agent value".
  std::vector<Variant> sweep_variants;
  std::vector<double> sweep_betas;
  std::vector<double> sweep_prior_scales;

  // Throws ConfigError naming the first offending field.
  void Validate() const;
};

// Grammar, one statement per line:
//   # comment            (also ';'); blank lines ignored
//   [section]            one of: experiment, env, agent, run, sweep
//   key = value          value lists are comma separated
// Keys are listed in README.md. Unknown sections or keys, keys outside a
// section, repeated keys and unparsable values raise ConfigError with the line
// number.
ExperimentConfig ParseConfig(std::string_view text,
                             ExperimentConfig base = ExperimentConfig());
ExperimentConfig LoadConfigFile(const std::string& path);

// Applies "section.key=value". Throws ConfigError.
void ApplyOverride(ExperimentConfig* config, std::string_view assignment);
void SetConfigValue(ExperimentConfig* config, std::string_view section,
                    std::string_view key, std::string_view value);

// Canonical text form; ParseConfig(Serialize(c)) reproduces c.
std::string SerializeConfig(const ExperimentConfig& config);

}  // namespace tdulab

#endif  // TDULAB_CLI_CONFIG_H_
