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

// Command-line entry point. Exit codes: 0 success, 1 run failure, 2
// configuration error.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tdulab/cli/bias_suite.h"
#include "tdulab/cli/config.h"
#include "tdulab/cli/experiment.h"
#include "tdulab/metrics/csv.h"

namespace {

constexpr int kOk = 0;
constexpr int kRunFailure = 1;
constexpr int kConfigError = 2;

struct ExperimentFlags {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output;
  int workers = 0;
};

void AddExperimentFlags(CLI::App* cmd, ExperimentFlags* flags) {
  cmd->add_option("-c,--config", flags->config_path,
                  "Config file (key = value with [sections])")
      ->check(CLI::ExistingFile);
  cmd->add_option("-s,--set", flags->overrides,
                  "Override, e.g. --set agent.beta=5 (repeatable)");
  cmd->add_option("-o,--output", flags->output,
                  "Output directory (default $TDULAB_OUTPUT_ROOT/<name>)");
  cmd->add_option("-w,--workers", flags->workers,
                  "Worker threads (default from config, 1)");
}

tdulab::ExperimentConfig BuildConfig(const ExperimentFlags& flags) {
  tdulab::ExperimentConfig config =
      flags.config_path.empty() ? tdulab::ExperimentConfig()
                                : tdulab::LoadConfigFile(flags.config_path);
  for (const std::string& o : flags.overrides) {
    tdulab::ApplyOverride(&config, o);
  }
  if (!flags.output.empty()) config.output_dir = flags.output;
  if (flags.workers > 0) config.workers = flags.workers;
  config.Validate();
  return config;
}

std::string JoinedDir(const std::string& input) {
  return std::filesystem::is_directory(input) ? input + "/summary.csv" : input;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tdulab: temporal-difference uncertainty experiments"};
  app.require_subcommand(1);

  ExperimentFlags run_flags;
  int run_size = 0;
  uint64_t run_seed = 0;
  CLI::App* run = app.add_subcommand("run", "Run a single (size, seed)");
  AddExperimentFlags(run, &run_flags);
  run->add_option("--size", run_size,
                  "Deep Sea N or tree depth (default: first in config)");
  run->add_option("--seed", run_seed, "Seed (default: first in config)");

  ExperimentFlags sweep_flags;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Run every variant x beta x lambda x size x seed in a config");
  AddExperimentFlags(sweep, &sweep_flags);

  tdulab::BiasSuiteOptions bias_options;
  std::string bias_output;
  CLI::App* bias = app.add_subcommand(
      "bias", "Run the value-uncertainty bias verifier on constructed MDPs");
  bias->add_option("--seed", bias_options.seed, "Seed")->capture_default_str();
  bias->add_option("--discount", bias_options.discount, "Discount")
      ->capture_default_str();
  bias->add_option("--instances", bias_options.random_instances,
                   "Random instances with rho in the window")
      ->capture_default_str();
  bias->add_option("--belief-probabilities", bias_options.belief_probabilities,
                   "Three probabilities for the consistency belief")
      ->delimiter(',');
  bias->add_option("-o,--output", bias_output,
                   "Output directory (default $TDULAB_OUTPUT_ROOT/bias)");

  std::string plot_input, plot_output;
  CLI::App* plot =
      app.add_subcommand("plot", "Render SVG curves from a sweep directory");
  plot->add_option("input", plot_input, "Sweep output directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  plot->add_option("-o,--output", plot_output,
                   "Directory for the SVGs (default: the input directory)");

  std::string score_input;
  CLI::App* score = app.add_subcommand(
      "score", "Print Deep Sea scores from a sweep summary.csv");
  score->add_option("input", score_input,
                    "summary.csv or the sweep directory holding it")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) {
      tdulab::ExperimentConfig config = BuildConfig(run_flags);
      config.sizes = {run_size > 0 ? run_size : config.sizes.front()};
      config.seeds = {run->count("--seed") ? run_seed : config.seeds.front()};
      if (!config.sweep_variants.empty()) {
        config.agent.variant = config.sweep_variants.front();
      }
      if (!config.sweep_betas.empty()) {
        config.agent.beta = config.sweep_betas.front();
      }
      if (!config.sweep_prior_scales.empty()) {
        config.agent.prior_scale = config.sweep_prior_scales.front();
      }
      config.sweep_variants.clear();
      config.sweep_betas.clear();
      config.sweep_prior_scales.clear();
      return tdulab::RunSweep(config, std::cerr);
    }
    if (*sweep) {
      return tdulab::RunSweep(BuildConfig(sweep_flags), std::cerr);
    }
    if (*bias) {
      const std::string dir =
          bias_output.empty() ? tdulab::OutputRoot() + "/bias" : bias_output;
      try {
        return tdulab::RunBiasSuite(bias_options, dir, std::cout);
      } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfigError;
      }
    }
    if (*plot) {
      std::vector<tdulab::EpisodeRow> rows;
      const std::filesystem::path runs = std::filesystem::path(plot_input) / "runs";
      if (!std::filesystem::is_directory(runs)) {
        std::cerr << "configuration error: no runs/ directory in "
                  << plot_input << "\n";
        return kConfigError;
      }
      std::vector<std::filesystem::path> files;
      for (const auto& entry : std::filesystem::directory_iterator(runs)) {
        if (entry.path().extension() == ".csv") files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) {
        const auto parsed =
            tdulab::ParseEpisodeCsv(tdulab::ReadTextFile(f.string()));
        rows.insert(rows.end(), parsed.begin(), parsed.end());
      }
      if (rows.empty()) {
        std::cerr << "no episode rows under " << runs << "\n";
        return kRunFailure;
      }
      const std::string out = plot_output.empty() ? plot_input : plot_output;
      for (const std::string& path : tdulab::WriteCurvePlots(rows, out)) {
        std::cout << path << "\n";
      }
      return kOk;
    }
    if (*score) {
      const auto rows = tdulab::ParseSummaryCsv(
          tdulab::ReadTextFile(JoinedDir(score_input)));
      tdulab::WriteScoreCsv(rows, std::cout);
      return kOk;
    }
  } catch (const tdulab::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRunFailure;
  }
  return kOk;
}
