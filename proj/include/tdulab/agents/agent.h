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

#ifndef TDULAB_AGENTS_AGENT_H_
#define TDULAB_AGENTS_AGENT_H_

#include <cstdint>
#include <span>

#include "tdulab/agents/config.h"
#include "tdulab/agents/ensemble.h"
#include "tdulab/agents/loss.h"
#include "tdulab/agents/variants.h"
#include "tdulab/envs/environment.h"
#include "tdulab/nn/rng.h"
#include "tdulab/replay/replay_buffer.h"

namespace tdulab {

// Named child streams of a run's root stream. Each concern draws from its own
// stream so that changing one (e.g. the mask probability) leaves the others
// untouched.
struct AgentStreams {
  RngStream init;
  RngStream masks;
  RngStream noise;
  RngStream heads;
  RngStream replay;
  RngStream actions;

  static AgentStreams FromRoot(const RngStream& root);
};

// Bootstrapped ensemble Q-learning agent. Acts greedily under one head per
// episode, stores every transition with a fixed mask and noise vector, and
// takes one ensemble SGD step every sgd_period environment steps once the
// replay holds min_replay_size transitions.
class Agent {
 public:
  Agent(const TduConfig& config, int observation_size, int num_actions,
        const RngStream& root, Execution execution = Execution::kParallel);

  // Chooses the head for the next episode.
  void BeginEpisode();
  int Act(std::span<const double> observation);
  // Returns true when an SGD step ran.
  bool Observe(std::span<const double> observation, int action,
               const StepResult& step);

  // Greedy action under the mean Q of the exploiter heads.
  int ExploitAction(std::span<const double> observation) const;

  const TduConfig& config() const { return config_; }
  const EnsembleState& ensemble() const { return ensemble_; }
  EnsembleState& mutable_ensemble() { return ensemble_; }
  const ReplayBuffer& replay() const { return replay_; }
  const BanditState& bandit() const { return bandit_; }
  const CountTable& counts() const { return counts_; }
  int active_head() const { return ensemble_.active_head; }
  int64_t total_steps() const { return total_steps_; }
  int64_t sgd_steps() const { return sgd_steps_; }
  double last_loss() const { return last_loss_; }

 private:
  TduConfig config_;
  int num_actions_;
  EnsembleState ensemble_;
  ReplayBuffer replay_;
  AgentStreams rng_;
  BanditState bandit_;
  CountTable counts_;
  Execution execution_;
  int64_t total_steps_ = 0;
  int64_t sgd_steps_ = 0;
  double last_loss_ = 0.0;
};

struct EpisodeOutcome {
  double episode_return = 0.0;
  int length = 0;
  int head = 0;
};

EpisodeOutcome RunEpisode(Agent& agent, Environment& env);

// Return of one rollout under Agent::ExploitAction; the agent is unchanged.
double EvaluateExploit(const Agent& agent, Environment& env);

}  // namespace tdulab

#endif  // TDULAB_AGENTS_AGENT_H_
