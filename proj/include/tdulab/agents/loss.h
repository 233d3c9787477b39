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

// Ensemble TD loss with temporal-difference uncertainty. Per transition the
// exploiter heads produce TD errors on the extrinsic reward; their spread
// (a stop-gradient quantity) is added to the reward seen by the explorer
// heads. All heads share one normalizer 1 / (2 (K + N) |D|).
//
// The kernel runs in three phases: per-head forward passes (parallel over
// heads), the per-transition exploration signal (serial, cheap), and per-head
// backward passes plus optimizer updates (parallel over heads). Head work is
// independent, so serial and parallel execution are bit-identical.

#ifndef TDULAB_AGENTS_LOSS_H_
#define TDULAB_AGENTS_LOSS_H_

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tdulab/agents/config.h"
#include "tdulab/agents/ensemble.h"
#include "tdulab/nn/mlp.h"
#include "tdulab/replay/replay_buffer.h"

namespace tdulab {

enum class Execution { kSerial, kParallel };

struct EnsembleLossResult {
  double loss = 0.0;
  std::vector<MlpGrad> grads;  // one per head, w.r.t. the online network
  // Per-transition exploration signal (sigma for tdu); empty when unused.
  std::vector<double> signal;
  Eigen::MatrixXd td_errors;  // heads x batch, as used in the loss
};

struct LossOptions {
  Execution execution = Execution::kParallel;
  // Replaces the computed signal when non-empty, holding it constant while
  // parameters are perturbed.
  std::span<const double> frozen_signal;
  bool compute_gradients = true;
};

// True when the variant feeds an exploration signal into `head`'s reward.
bool HeadUsesSignal(const TduConfig& config, int head);
// True when the variant needs the per-transition signal at all.
bool NeedsSignal(const TduConfig& config);

// Exploration signal for one transition from the exploiter heads' TD errors
// (on extrinsic plus noise reward) and their Q(s, a) values.
double ExplorationSignal(const TduConfig& config,
                         std::span<const double> exploiter_td_errors,
                         std::span<const double> exploiter_q_values,
                         const Transition& transition);

EnsembleLossResult EnsembleTdLoss(const EnsembleState& ensemble,
                                  const Batch& batch, const TduConfig& config,
                                  const LossOptions& options = {});

// One Adam step per head, then target sync for heads whose step count is a
// multiple of the target period.
void ApplyGradients(const std::vector<MlpGrad>& grads, const TduConfig& config,
                    EnsembleState* ensemble,
                    Execution execution = Execution::kParallel);

// Loss, gradients and updates fused per head. Returns the loss.
double EnsembleTrainStep(const Batch& batch, const TduConfig& config,
                         EnsembleState* ensemble,
                         Execution execution = Execution::kParallel);

}  // namespace tdulab

#endif  // TDULAB_AGENTS_LOSS_H_
