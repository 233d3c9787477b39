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

#include "tdulab/agents/reference.h"

#include <stdexcept>

#include "tdulab/agents/td.h"

namespace tdulab::reference {
namespace {

// Gradient of one head's masked squared TD errors via the generic batch
// interface. rewards and bootstraps are constants of the loss.
LossAndGrad HeadGradient(const Head& head, int head_index, const Batch& batch,
                         const TduConfig& config,
                         const std::vector<double>& rewards,
                         const std::vector<double>& bootstraps,
                         double inv_norm) {
  const Eigen::Index n = static_cast<Eigen::Index>(batch.size());
  Eigen::MatrixXd inputs(head.online.input_size(), n);
  std::vector<Eigen::VectorXd> priors(batch.size());
  for (Eigen::Index b = 0; b < n; ++b) {
    const auto& obs = batch[b].observation;
    inputs.col(b) = Eigen::Map<const Eigen::VectorXd>(
        obs.data(), static_cast<Eigen::Index>(obs.size()));
    if (config.prior_scale != 0.0) priors[b] = MlpForward(head.prior, obs);
  }
  auto loss = [&](const Eigen::MatrixXd& outputs, Eigen::MatrixXd* grads) {
    double sum = 0.0;
    for (Eigen::Index b = 0; b < n; ++b) {
      const Transition& t = batch[b];
      double q_sa = outputs(t.action, b);
      if (config.prior_scale != 0.0) {
        q_sa = q_sa + config.prior_scale * priors[b][t.action];
      }
      const double delta = TdErrorFrom(rewards[b], bootstraps[b], q_sa);
      const double mask = t.mask[head_index];
      sum += mask * delta * delta;
      (*grads)(t.action, b) = TdOutputGradient(mask, delta, inv_norm);
    }
    return sum;
  };
  return MlpGradient(head.online, inputs, loss);
}

}  // namespace

EnsembleLossResult TduLoss(const EnsembleState& ensemble, const Batch& batch,
                           const TduConfig& config,
                           std::span<const double> frozen_signal) {
  if (batch.empty()) throw std::invalid_argument("reference::TduLoss: empty batch");
  const int num_heads = ensemble.size();
  const int k = ensemble.num_exploiters;
  const double inv_norm =
      1.0 / (static_cast<double>(num_heads) * static_cast<double>(batch.size()));

  EnsembleLossResult result;
  result.td_errors.resize(num_heads, static_cast<Eigen::Index>(batch.size()));
  // Signal, one transition at a time.
  if (!frozen_signal.empty()) {
    result.signal.assign(frozen_signal.begin(), frozen_signal.end());
  } else if (NeedsSignal(config)) {
    for (const Transition& t : batch) {
      std::vector<double> deltas, q_values;
      for (int h = 0; h < k; ++h) {
        const Head& head = ensemble.heads[h];
        deltas.push_back(
            TdError(head, t, config, t.reward + config.noise_scale * t.noise[h]));
        q_values.push_back(
            QValues(head, t.observation, config.prior_scale)[t.action]);
      }
      result.signal.push_back(ExplorationSignal(config, deltas, q_values, t));
    }
  }

  double total = 0.0;
  for (int h = 0; h < num_heads; ++h) {
    const Head& head = ensemble.heads[h];
    std::vector<double> rewards, bootstraps;
    for (std::size_t b = 0; b < batch.size(); ++b) {
      const Transition& t = batch[b];
      double reward = t.reward;
      if (HeadUsesSignal(config, h)) reward = reward + config.beta * result.signal[b];
      rewards.push_back(reward + config.noise_scale * t.noise[h]);
      bootstraps.push_back(BootstrapValue(head, t, config));
      result.td_errors(h, static_cast<Eigen::Index>(b)) =
          TdError(head, t, config, rewards.back());
    }
    LossAndGrad lg =
        HeadGradient(head, h, batch, config, rewards, bootstraps, inv_norm);
    total += lg.loss;
    result.grads.push_back(std::move(lg.grad));
  }
  result.loss = 0.5 * total * inv_norm;
  return result;
}

BootstrappedDqn::BootstrappedDqn(const TduConfig& config, int observation_size,
                                 int num_actions, const RngStream& root)
    : config_(config),
      replay_(static_cast<std::size_t>(config.replay_capacity),
              static_cast<std::size_t>(config.ensemble_size())),
      rng_(AgentStreams::FromRoot(root)) {
  config_.variant = Variant::kBdqn;
  ensemble_ = InitEnsemble(config_, observation_size, num_actions, rng_.init);
}

void BootstrappedDqn::BeginEpisode() {
  ensemble_.active_head =
      static_cast<int>(rng_.heads.UniformInt(ensemble_.heads.size()));
}

int BootstrappedDqn::Act(std::span<const double> observation) const {
  return GreedyAction(QValues(ensemble_.heads[ensemble_.active_head],
                              observation, config_.prior_scale));
}

bool BootstrappedDqn::Observe(std::span<const double> observation, int action,
                              const StepResult& step) {
  const int num_heads = ensemble_.size();
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
  replay_.Add(std::move(t));
  ++total_steps_;
  if (replay_.size() < static_cast<std::size_t>(config_.min_replay_size)) {
    return false;
  }
  if (total_steps_ % config_.sgd_period != 0) return false;
  SgdStep(replay_.Sample(static_cast<std::size_t>(config_.batch_size), rng_.replay));
  return true;
}

void BootstrappedDqn::SgdStep(const Batch& batch) {
  const int num_heads = ensemble_.size();
  const double inv_norm =
      1.0 / (static_cast<double>(num_heads) * static_cast<double>(batch.size()));
  for (int h = 0; h < num_heads; ++h) {
    Head& head = ensemble_.heads[h];
    std::vector<double> rewards, bootstraps;
    for (const Transition& t : batch) {
      rewards.push_back(t.reward + config_.noise_scale * t.noise[h]);
      bootstraps.push_back(BootstrapValue(head, t, config_));
    }
    const LossAndGrad lg =
        HeadGradient(head, h, batch, config_, rewards, bootstraps, inv_norm);
    AdamUpdate(lg.grad, &head.adam, &head.online);
    ++head.step;
    if (head.step % config_.target_update_period == 0) {
      head.target = head.online;
      if (config_.sync_target_prior) head.prior_target = head.prior;
    }
  }
}

}  // namespace tdulab::reference
