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

#include "tdulab/cli/config.h"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "tdulab/metrics/csv.h"

namespace tdulab {
namespace {

std::string_view Trim(std::string_view s) {
  const auto not_space = [](char c) {
    return c != ' ' && c != '\t' && c != '\r';
  };
  while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> SplitList(std::string_view value) {
  std::vector<std::string_view> out;
  if (Trim(value).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = value.find(',', start);
    out.push_back(Trim(value.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void Fail(std::string_view key, std::string_view value,
                       std::string_view expected) {
  throw ConfigError("config key '" + std::string(key) + "': cannot parse '" +
                    std::string(value) + "' as " + std::string(expected));
}

int64_t ToInt(std::string_view key, std::string_view v) {
  int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    Fail(key, v, "an integer");
  }
  return out;
}

uint64_t ToUnsigned(std::string_view key, std::string_view v) {
  uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    Fail(key, v, "a non-negative integer");
  }
  return out;
}

double ToDouble(std::string_view key, std::string_view v) {
  const std::string s(v);
  char* end = nullptr;
  const double out = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(out)) {
    Fail(key, v, "a finite number");
  }
  return out;
}

bool ToBool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  Fail(key, v, "a boolean");
}

Variant ToVariant(std::string_view key, std::string_view v) {
  const auto variant = ParseVariant(v);
  if (!variant) Fail(key, v, "a variant (tdu, bdqn, qu, q_ucb, qex, cts, tdu_bandit)");
  return *variant;
}

template <typename T, typename F>
std::vector<T> ToList(std::string_view key, std::string_view v, F parse) {
  std::vector<T> out;
  for (std::string_view item : SplitList(v)) out.push_back(parse(key, item));
  return out;
}

int ToInt32(std::string_view key, std::string_view v) {
  const int64_t x = ToInt(key, v);
  if (x < -(int64_t{1} << 31) || x >= (int64_t{1} << 31)) {
    Fail(key, v, "a 32-bit integer");
  }
  return static_cast<int>(x);
}

using Setter = std::function<void(ExperimentConfig*, std::string_view key,
                                  std::string_view value)>;

const std::map<std::string, Setter>& Setters() {
  static const auto* setters = new std::map<std::string, Setter>{
      {"experiment.name",
       [](ExperimentConfig* c, auto, auto v) { c->name = std::string(v); }},
      {"experiment.output_dir",
       [](ExperimentConfig* c, auto, auto v) { c->output_dir = std::string(v); }},
      {"env.kind",
       [](ExperimentConfig* c, auto k, auto v) {
         if (v == "deep_sea") {
           c->env = EnvKind::kDeepSea;
         } else if (v == "binary_tree") {
           c->env = EnvKind::kBinaryTree;
         } else {
           Fail(k, v, "deep_sea or binary_tree");
         }
       }},
      {"env.stochastic",
       [](ExperimentConfig* c, auto k, auto v) { c->stochastic = ToBool(k, v); }},
      {"env.sizes",
       [](ExperimentConfig* c, auto k, auto v) {
         c->sizes = ToList<int>(k, v, ToInt32);
       }},
      {"agent.variant",
       [](ExperimentConfig* c, auto k, auto v) {
         c->agent.variant = ToVariant(k, v);
       }},
      {"agent.exploiters",
       [](ExperimentConfig* c, auto k, auto v) {
         c->agent.num_exploiters = ToInt32(k, v);
       }},
      {"agent.explorers",
       [](ExperimentConfig* c, auto k, auto v) {
         c->agent.num_explorers = ToInt32(k, v);
       }},
      {"agent.beta",
       [](ExperimentConfig* c, auto k, auto v) { c->agent.beta = ToDouble(k, v); }},
      {"agent.prior_scale",
       [](ExperimentConfig* c, auto k, auto v) {
         c->agent.prior_scale = ToDouble(k, v);
       }},
      {"agent.discount",
       [](ExperimentConfig* c, auto k, auto v) {
         c->agent.discount = ToDouble(k, v);
       }},
      {"agent.mask_probability",
       [](ExperimentConfig* c, auto k, auto v) {
         c->agent.mask_probability = ToDouble(k, v);
       }},
      {"agent.noise_scale",
       [](ExperimentConfig* c, auto k, auto v) {
         c->agent.noise_scale = ToDouble(k, v);
       }},
      {"agent.batch_size",
       [](ExperimentConfig* c, auto k, auto v) {
         c->agent.batch_size = ToInt32(k, v);
       }},
      {"agent.learning_rate",
       [](ExperimentConfig* c, auto k, auto v) {
         c->agent.learning_rate = ToDouble(k, v);
       }},
      {"agent.sgd_period",
       [](ExperimentConfig* c, auto k, auto v) {
         c->agent.sgd_period = ToInt32(k, v);
       }},
      {"agent.target_update_period",
       [](ExperimentConfig* c, auto k, auto v) {
         c->agent.target_update_period = ToInt32(k, v);
       }},
      {"agent.min_replay_size",
       [](ExperimentConfig* c, auto k, auto v) {
         c->agent.min_replay_size = ToInt32(k, v);
       }},
      {"agent.replay_capacity",
       [](ExperimentConfig* c, auto k, auto v) {
         c->agent.replay_capacity = ToInt32(k, v);
       }},
      {"agent.hidden_sizes",
       [](ExperimentConfig* c, auto k, auto v) {
         c->agent.hidden_sizes = ToList<int>(k, v, ToInt32);
       }},
      {"agent.double_dqn",
       [](ExperimentConfig* c, auto k, auto v) {
         c->agent.double_dqn = ToBool(k, v);
       }},
      {"agent.epsilon",
       [](ExperimentConfig* c, auto k, auto v) {
         c->agent.epsilon = ToDouble(k, v);
       }},
      {"agent.sync_target_prior",
       [](ExperimentConfig* c, auto k, auto v) {
         c->agent.sync_target_prior = ToBool(k, v);
       }},
      {"agent.bandit_eta",
       [](ExperimentConfig* c, auto k, auto v) {
         c->agent.bandit_eta = ToDouble(k, v);
       }},
      {"run.seeds",
       [](ExperimentConfig* c, auto k, auto v) {
         c->seeds = ToList<uint64_t>(k, v, ToUnsigned);
       }},
      {"run.episode_ceiling",
       [](ExperimentConfig* c, auto k, auto v) {
         c->episode_ceiling = ToInt(k, v);
       }},
      {"run.stop_on_solve",
       [](ExperimentConfig* c, auto k, auto v) {
         c->stop_on_solve = ToBool(k, v);
       }},
      {"run.solve_threshold",
       [](ExperimentConfig* c, auto k, auto v) {
         c->solve_threshold = ToDouble(k, v);
       }},
      {"run.regret_window",
       [](ExperimentConfig* c, auto k, auto v) {
         c->regret_window = ToInt(k, v);
       }},
      {"run.retain_episodes",
       [](ExperimentConfig* c, auto k, auto v) {
         c->retain_episodes = ToInt32(k, v);
       }},
      {"run.workers",
       [](ExperimentConfig* c, auto k, auto v) { c->workers = ToInt32(k, v); }},
      {"run.kernel",
       [](ExperimentConfig* c, auto k, auto v) {
         if (v == "serial") {
           c->kernel = Execution::kSerial;
         } else if (v == "parallel") {
           c->kernel = Execution::kParallel;
         } else {
           Fail(k, v, "serial or parallel");
         }
       }},
      {"sweep.variants",
       [](ExperimentConfig* c, auto k, auto v) {
         c->sweep_variants = ToList<Variant>(k, v, ToVariant);
       }},
      {"sweep.betas",
       [](ExperimentConfig* c, auto k, auto v) {
         c->sweep_betas = ToList<double>(k, v, ToDouble);
       }},
      {"sweep.prior_scales",
       [](ExperimentConfig* c, auto k, auto v) {
         c->sweep_prior_scales = ToList<double>(k, v, ToDouble);
       }},
  };
  return *setters;
}

template <typename T, typename F>
std::string JoinList(const std::vector<T>& items, F format) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    out += format(items[i]);
  }
  return out;
}

}  // namespace

std::string EnvKindName(EnvKind kind, bool stochastic) {
  if (kind == EnvKind::kBinaryTree) return "binary_tree";
  return stochastic ? "deep_sea_stochastic" : "deep_sea";
}

void ExperimentConfig::Validate() const {
  if (name.empty() || name.find_first_of("/\\") != std::string::npos) {
    throw ConfigError("experiment.name must be a non-empty file name");
  }
  if (sizes.empty()) throw ConfigError("env.sizes must not be empty");
  for (int size : sizes) {
    if (env == EnvKind::kDeepSea && (size < 4 || size > 60)) {
      throw ConfigError("env.sizes: Deep Sea size " + std::to_string(size) +
                        " outside [4, 60]");
    }
    if (env == EnvKind::kBinaryTree && (size < 1 || size > 10000)) {
      throw ConfigError("env.sizes: tree depth " + std::to_string(size) +
                        " outside [1, 10000]");
    }
  }
  if (env == EnvKind::kBinaryTree && stochastic) {
    throw ConfigError("env.stochastic applies to deep_sea only");
  }
  if (seeds.empty()) throw ConfigError("run.seeds must not be empty");
  if (episode_ceiling < 1) throw ConfigError("run.episode_ceiling must be >= 1");
  if (!(solve_threshold > 0.0)) {
    throw ConfigError("run.solve_threshold must be positive");
  }
  if (regret_window < 0) throw ConfigError("run.regret_window must be >= 0");
  if (retain_episodes < 1) throw ConfigError("run.retain_episodes must be >= 1");
  if (workers < 1) throw ConfigError("run.workers must be >= 1");
  for (double b : sweep_betas) {
    if (b < 0.0) throw ConfigError("sweep.betas must be non-negative");
  }
  for (double l : sweep_prior_scales) {
    if (l < 0.0) throw ConfigError("sweep.prior_scales must be non-negative");
  }
  try {
    agent.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("agent: ") + e.what());
  }
}

void SetConfigValue(ExperimentConfig* config, std::string_view section,
                    std::string_view key, std::string_view value) {
  const std::string full = std::string(section) + "." + std::string(key);
  const auto it = Setters().find(full);
  if (it == Setters().end()) {
    throw ConfigError("unknown config key '" + full + "'");
  }
  it->second(config, full, Trim(value));
}

void ApplyOverride(ExperimentConfig* config, std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  const std::string_view lhs = Trim(assignment.substr(0, eq));
  const std::size_t dot = lhs.find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) +
                      "' is not of the form section.key=value");
  }
  SetConfigValue(config, lhs.substr(0, dot), lhs.substr(dot + 1),
                 assignment.substr(eq + 1));
}

ExperimentConfig ParseConfig(std::string_view text, ExperimentConfig base) {
  static const std::set<std::string, std::less<>> kSections = {
      "experiment", "env", "agent", "run", "sweep"};
  std::string section;
  std::set<std::string> seen;
  int line_number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = Trim(text.substr(start, end - start));
    start = end + 1;
    ++line_number;
    const std::string where = "line " + std::to_string(line_number) + ": ";
    if (line.empty() || line.front() == '#' || line.front() == ';') {
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(where + "malformed section header");
      }
      const std::string_view name = Trim(line.substr(1, line.size() - 2));
      if (!kSections.contains(name)) {
        throw ConfigError(where + "unknown section [" + std::string(name) +
                          "]");
      }
      section = std::string(name);
    } else {
      const std::size_t eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw ConfigError(where + "expected key = value");
      }
      const std::string_view key = Trim(line.substr(0, eq));
      if (key.empty()) throw ConfigError(where + "empty key");
      if (section.empty()) {
        throw ConfigError(where + "key '" + std::string(key) +
                          "' appears before any [section]");
      }
      const std::string full = section + "." + std::string(key);
      if (!seen.insert(full).second) {
        throw ConfigError(where + "repeated key '" + full + "'");
      }
      try {
        SetConfigValue(&base, section, key, line.substr(eq + 1));
      } catch (const ConfigError& e) {
        throw ConfigError(where + e.what());
      }
    }
    if (end == text.size()) break;
  }
  return base;
}

ExperimentConfig LoadConfigFile(const std::string& path) {
  std::string text;
  try {
    text = ReadTextFile(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  try {
    return ParseConfig(text);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string SerializeConfig(const ExperimentConfig& c) {
  const auto num = [](double v) { return FormatDouble(v); };
  const auto integer = [](auto v) { return std::to_string(v); };
  const auto boolean = [](bool b) { return std::string(b ? "true" : "false"); };
  const TduConfig& a = c.agent;
  std::ostringstream out;
  out << "[experiment]\n"
      << "name = " << c.name << "\n"
      << "output_dir = " << c.output_dir << "\n\n"
      << "[env]\n"
      << "kind = " << (c.env == EnvKind::kDeepSea ? "deep_sea" : "binary_tree")
      << "\n"
      << "stochastic = " << boolean(c.stochastic) << "\n"
      << "sizes = " << JoinList(c.sizes, integer) << "\n\n"
      << "[agent]\n"
      << "variant = " << VariantName(a.variant) << "\n"
      << "exploiters = " << a.num_exploiters << "\n"
      << "explorers = " << a.num_explorers << "\n"
      << "beta = " << num(a.beta) << "\n"
      << "prior_scale = " << num(a.prior_scale) << "\n"
      << "discount = " << num(a.discount) << "\n"
      << "mask_probability = " << num(a.mask_probability) << "\n"
      << "noise_scale = " << num(a.noise_scale) << "\n"
      << "batch_size = " << a.batch_size << "\n"
      << "learning_rate = " << num(a.learning_rate) << "\n"
      << "sgd_period = " << a.sgd_period << "\n"
      << "target_update_period = " << a.target_update_period << "\n"
      << "min_replay_size = " << a.min_replay_size << "\n"
      << "replay_capacity = " << a.replay_capacity << "\n"
      << "hidden_sizes = " << JoinList(a.hidden_sizes, integer) << "\n"
      << "double_dqn = " << boolean(a.double_dqn) << "\n"
      << "epsilon = " << num(a.epsilon) << "\n"
      << "sync_target_prior = " << boolean(a.sync_target_prior) << "\n"
      << "bandit_eta = " << num(a.bandit_eta) << "\n\n"
      << "[run]\n"
      << "seeds = " << JoinList(c.seeds, integer) << "\n"
      << "episode_ceiling = " << c.episode_ceiling << "\n"
      << "stop_on_solve = " << boolean(c.stop_on_solve) << "\n"
      << "solve_threshold = " << num(c.solve_threshold) << "\n"
      << "regret_window = " << c.regret_window << "\n"
      << "retain_episodes = " << c.retain_episodes << "\n"
      << "workers = " << c.workers << "\n"
      << "kernel = "
      << (c.kernel == Execution::kSerial ? "serial" : "parallel") << "\n\n"
      << "[sweep]\n"
      << "variants = " << JoinList(c.sweep_variants, VariantName) << "\n"
      << "betas = " << JoinList(c.sweep_betas, num) << "\n"
      << "prior_scales = " << JoinList(c.sweep_prior_scales, num) << "\n";
  return out.str();
}

}  // namespace tdulab
