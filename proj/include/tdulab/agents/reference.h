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

// Straightforward serial implementations kept as test oracles for the ensemble
// kernels in loss.h: a transition-by-transition TDU loss and a plain masked
// Bootstrapped DQN agent with its own training loop.

#ifndef TDULAB_AGENTS_REFERENCE_H_
#define TDULAB_AGENTS_REFERENCE_H_

#include <span>

#include "tdulab/agents/agent.h"
#include "tdulab/agents/loss.h"

namespace tdulab::reference {

// Loss and online-network gradients, computed one transition at a time for
// the signal and with MlpGradient per head for the gradients.
EnsembleLossResult TduLoss(const EnsembleState& ensemble, const Batch& batch,
                           const TduConfig& config,
                           std::span<const double> frozen_signal = {});

// Masked Bootstrapped DQN over config.ensemble_size() heads, all trained on
// the extrinsic reward. Uses the same named random streams as Agent.
class BootstrappedDqn {
 public:
  BootstrappedDqn(const TduConfig& config, int observation_size,
                  int num_actions, const RngStream& root);

  void BeginEpisode();
  int Act(std::span<const double> observation) const;
  bool Observe(std::span<const double> observation, int action,
               const StepResult& step);

  const EnsembleState& ensemble() const { return ensemble_; }

 private:
  void SgdStep(const Batch& batch);

  TduConfig config_;
  EnsembleState ensemble_;
  ReplayBuffer replay_;
  AgentStreams rng_;
  int64_t total_steps_ = 0;
};

}  // namespace tdulab::reference

#endif  // TDULAB_AGENTS_REFERENCE_H_
