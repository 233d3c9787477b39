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

#include "tdulab/agents/agent.h"

#include "tdulab/agents/td.h"

namespace tdulab {

AgentStreams AgentStreams::FromRoot(const RngStream& root) {
  return {root.Split("init"),  root.Split("masks"),  root.Split("noise"),
          root.Split("heads"), root.Split("replay"), root.Split("actions")};
}

Agent::Agent(const TduConfig& config, int observation_size, int num_actions,
             const RngStream& root, Execution execution)
    : config_(config),
      num_actions_(num_actions),
      replay_(static_cast<std::size_t>(config.replay_capacity),
              static_cast<std::size_t>(config.ensemble_size())),
      rng_(AgentStreams::FromRoot(root)),
      bandit_(config.ensemble_size()),
      execution_(execution) {
  config_.Validate();
  ensemble_ = InitEnsemble(config_, observation_size, num_actions, rng_.init);
}

void Agent::BeginEpisode() {
  if (config_.variant == Variant::kTduBandit) {
    ensemble_.active_head = BanditSelectHead(bandit_, config_.bandit_eta);
  } else {
    ensemble_.active_head =
        static_cast<int>(rng_.heads.UniformInt(ensemble_.heads.size()));
  }
}

int Agent::Act(std::span<const double> observation) {
  if (config_.epsilon > 0.0 && rng_.actions.Uniform() < config_.epsilon) {
    return static_cast<int>(rng_.actions.UniformInt(num_actions_));
  }
  if (config_.variant == Variant::kQUcb) {
    return UcbAction(ensemble_, observation, config_.beta, config_.prior_scale);
  }
  return GreedyAction(QValues(ensemble_.heads[ensemble_.active_head],
                              observation, config_.prior_scale));
}

int Agent::ExploitAction(std::span<const double> observation) const {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(num_actions_);
  for (int k = 0; k < ensemble_.num_exploiters; ++k) {
    mean += QValues(ensemble_.heads[k], observation, config_.prior_scale);
  }
  return GreedyAction(mean);
}

bool Agent::Observe(std::span<const double> observation, int action,
                    const StepResult& step) {
  const int num_heads = ensemble_.size();
  if (config_.variant == Variant::kTduBandit) {
    bandit_.Record(ensemble_.active_head, step.reward);
  }
  Transition t;
  t.observation.assign(observation.begin(), observation.end());
  t.action = action;
  t.reward = step.reward;
  t.discount = step.discount;
  t.next_observation = step.observation;
  t.mask.resize(num_heads);
  for (auto& m : t.mask) m = rng_.masks.Bernoulli(config_.mask_probability) ? 1 : 0;
  t.noise.resize(num_heads);
  for (auto& z : t.noise) z = rng_.noise.Normal();
  if (config_.variant == Variant::kCts) {
    const int64_t state = StateIndex(observation);
    counts_.Visit(state, action);
    t.count_bonus = counts_.Bonus(state, action);
  }
  replay_.Add(std::move(t));
  ++total_steps_;

  if (replay_.size() < static_cast<std::size_t>(config_.min_replay_size)) {
    return false;
  }
  if (total_steps_ % config_.sgd_period != 0) return false;
  const Batch batch =
      replay_.Sample(static_cast<std::size_t>(config_.batch_size), rng_.replay);
  last_loss_ = EnsembleTrainStep(batch, config_, &ensemble_, execution_);
  ++sgd_steps_;
  return true;
}

EpisodeOutcome RunEpisode(Agent& agent, Environment& env) {
  EpisodeOutcome outcome;
  agent.BeginEpisode();
  outcome.head = agent.active_head();
  std::vector<double> observation = env.Reset();
  while (!env.episode_done()) {
    const int action = agent.Act(observation);
    StepResult step = env.Step(action);
    outcome.episode_return += step.reward;
    ++outcome.length;
    agent.Observe(observation, action, step);
    observation = std::move(step.observation);
  }
  return outcome;
}

double EvaluateExploit(const Agent& agent, Environment& env) {
  double total = 0.0;
  std::vector<double> observation = env.Reset();
  while (!env.episode_done()) {
    StepResult step = env.Step(agent.ExploitAction(observation));
    total += step.reward;
    observation = std::move(step.observation);
  }
  return total;
}

}  // namespace tdulab
