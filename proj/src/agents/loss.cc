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

#include "tdulab/agents/loss.h"

#include <cmath>
#include <stdexcept>

#include "tdulab/agents/td.h"

namespace tdulab {
namespace {

struct HeadForward {
  std::vector<MlpTape> tapes;
  std::vector<double> q_sa;
  std::vector<double> bootstrap;
};

void ForwardHead(const Head& head, const Batch& batch, const TduConfig& config,
                 HeadForward* out) {
  const std::size_t n = batch.size();
  out->tapes.resize(n);
  out->q_sa.resize(n);
  out->bootstrap.resize(n);
  for (std::size_t b = 0; b < n; ++b) {
    const Transition& t = batch[b];
    MlpForward(head.online, t.observation, &out->tapes[b]);
    Eigen::VectorXd q = out->tapes[b].output();
    if (config.prior_scale != 0.0) {
      q += config.prior_scale * MlpForward(head.prior, t.observation);
    }
    out->q_sa[b] = q[t.action];
    out->bootstrap[b] = BootstrapValue(head, t, config);
  }
}

double HeadReward(const TduConfig& config, int head, const Transition& t,
                  double signal) {
  double reward = t.reward;
  if (HeadUsesSignal(config, head)) reward = reward + config.beta * signal;
  return reward + config.noise_scale * t.noise[head];
}

// Loss contribution (unnormalized) and, optionally, gradients for one head.
double BackwardHead(const Head& head, int head_index, const Batch& batch,
                    const TduConfig& config, const HeadForward& forward,
                    std::span<const double> signal, double inv_norm,
                    double* td_row, MlpGrad* grad) {
  double sum = 0.0;
  const int num_actions = head.online.output_size();
  Eigen::VectorXd output_grad = Eigen::VectorXd::Zero(num_actions);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Transition& t = batch[b];
    const double s = signal.empty() ? 0.0 : signal[b];
    const double reward = HeadReward(config, head_index, t, s);
    const double delta = TdErrorFrom(reward, forward.bootstrap[b], forward.q_sa[b]);
    const double mask = t.mask[head_index];
    td_row[b] = delta;
    sum += mask * delta * delta;
    if (grad != nullptr && mask != 0.0) {
      output_grad[t.action] = TdOutputGradient(mask, delta, inv_norm);
      MlpBackward(head.online, forward.tapes[b], output_grad, grad);
      output_grad[t.action] = 0.0;
    }
  }
  return sum;
}

std::vector<double> ComputeSignal(const TduConfig& config, const Batch& batch,
                                  const std::vector<HeadForward>& forwards,
                                  int num_exploiters) {
  std::vector<double> signal(batch.size(), 0.0);
  std::vector<double> deltas(num_exploiters), q_values(num_exploiters);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Transition& t = batch[b];
    for (int k = 0; k < num_exploiters; ++k) {
      const double reward = t.reward + config.noise_scale * t.noise[k];
      deltas[k] = TdErrorFrom(reward, forwards[k].bootstrap[b], forwards[k].q_sa[b]);
      q_values[k] = forwards[k].q_sa[b];
    }
    signal[b] = ExplorationSignal(config, deltas, q_values, t);
  }
  return signal;
}

void CheckBatch(const EnsembleState& ensemble, const Batch& batch,
                const TduConfig& config) {
  if (batch.empty()) throw std::invalid_argument("EnsembleTdLoss: empty batch");
  if (ensemble.size() != config.ensemble_size() ||
      ensemble.num_exploiters != config.num_exploiters) {
    throw std::invalid_argument("EnsembleTdLoss: ensemble/config mismatch");
  }
  for (const Transition& t : batch) {
    if (static_cast<int>(t.mask.size()) != ensemble.size() ||
        static_cast<int>(t.noise.size()) != ensemble.size()) {
      throw std::invalid_argument("EnsembleTdLoss: mask/noise length mismatch");
    }
  }
}

void SyncTarget(const TduConfig& config, Head* head) {
  if (head->step % config.target_update_period == 0) {
    head->target = head->online;
    if (config.sync_target_prior) head->prior_target = head->prior;
  }
}

}  // namespace

bool HeadUsesSignal(const TduConfig& config, int head) {
  switch (config.variant) {
    case Variant::kTdu:
    case Variant::kTduBandit:
    case Variant::kQu:
    case Variant::kQex:
      return head >= config.num_exploiters;
    case Variant::kCts:
      return true;
    case Variant::kBdqn:
    case Variant::kQUcb:
      return false;
  }
  return false;
}

bool NeedsSignal(const TduConfig& config) {
  for (int h = 0; h < config.ensemble_size(); ++h) {
    if (HeadUsesSignal(config, h)) return true;
  }
  return false;
}

double ExplorationSignal(const TduConfig& config,
                         std::span<const double> exploiter_td_errors,
                         std::span<const double> exploiter_q_values,
                         const Transition& transition) {
  switch (config.variant) {
    case Variant::kTdu:
    case Variant::kTduBandit:
      return TduSigma(exploiter_td_errors);
    case Variant::kQu:
      return TduSigma(exploiter_q_values);
    case Variant::kQex: {
      double mean = 0.0;
      for (double d : exploiter_td_errors) mean += d;
      return std::abs(mean / static_cast<double>(exploiter_td_errors.size()));
    }
    case Variant::kCts:
      return transition.count_bonus;
    case Variant::kBdqn:
    case Variant::kQUcb:
      return 0.0;
  }
  return 0.0;
}

EnsembleLossResult EnsembleTdLoss(const EnsembleState& ensemble,
                                  const Batch& batch, const TduConfig& config,
                                  const LossOptions& options) {
  CheckBatch(ensemble, batch, config);
  const int num_heads = ensemble.size();
  const bool parallel = options.execution == Execution::kParallel;
  const double inv_norm =
      1.0 / (static_cast<double>(num_heads) * static_cast<double>(batch.size()));

  std::vector<HeadForward> forwards(num_heads);
#pragma omp parallel for schedule(static) if (parallel)
  for (int h = 0; h < num_heads; ++h) {
    ForwardHead(ensemble.heads[h], batch, config, &forwards[h]);
  }

  EnsembleLossResult result;
  if (!options.frozen_signal.empty()) {
    if (options.frozen_signal.size() != batch.size()) {
      throw std::invalid_argument("EnsembleTdLoss: frozen signal size mismatch");
    }
    result.signal.assign(options.frozen_signal.begin(),
                         options.frozen_signal.end());
  } else if (NeedsSignal(config)) {
    result.signal = ComputeSignal(config, batch, forwards, ensemble.num_exploiters);
  }

  result.td_errors.resize(num_heads, static_cast<Eigen::Index>(batch.size()));
  if (options.compute_gradients) {
    result.grads.resize(num_heads);
  }
  std::vector<double> head_sums(num_heads, 0.0);
#pragma omp parallel for schedule(static) if (parallel)
  for (int h = 0; h < num_heads; ++h) {
    std::vector<double> row(batch.size());
    MlpGrad* grad = nullptr;
    if (options.compute_gradients) {
      result.grads[h] = ZerosLike(ensemble.heads[h].online);
      grad = &result.grads[h];
    }
    head_sums[h] = BackwardHead(ensemble.heads[h], h, batch, config, forwards[h],
                                result.signal, inv_norm, row.data(), grad);
    for (std::size_t b = 0; b < batch.size(); ++b) {
      result.td_errors(h, static_cast<Eigen::Index>(b)) = row[b];
    }
  }
  double total = 0.0;
  for (double s : head_sums) total += s;
  result.loss = 0.5 * total * inv_norm;
  return result;
}

void ApplyGradients(const std::vector<MlpGrad>& grads, const TduConfig& config,
                    EnsembleState* ensemble, Execution execution) {
  if (static_cast<int>(grads.size()) != ensemble->size()) {
    throw std::invalid_argument("ApplyGradients: one gradient per head required");
  }
  const bool parallel = execution == Execution::kParallel;
#pragma omp parallel for schedule(static) if (parallel)
  for (int h = 0; h < ensemble->size(); ++h) {
    Head& head = ensemble->heads[h];
    AdamUpdate(grads[h], &head.adam, &head.online);
    ++head.step;
    SyncTarget(config, &head);
  }
}

double EnsembleTrainStep(const Batch& batch, const TduConfig& config,
                         EnsembleState* ensemble, Execution execution) {
  CheckBatch(*ensemble, batch, config);
  const int num_heads = ensemble->size();
  const bool parallel = execution == Execution::kParallel;
  const double inv_norm =
      1.0 / (static_cast<double>(num_heads) * static_cast<double>(batch.size()));

  std::vector<HeadForward> forwards(num_heads);
#pragma omp parallel for schedule(static) if (parallel)
  for (int h = 0; h < num_heads; ++h) {
    ForwardHead(ensemble->heads[h], batch, config, &forwards[h]);
  }
  std::vector<double> signal;
  if (NeedsSignal(config)) {
    signal = ComputeSignal(config, batch, forwards, ensemble->num_exploiters);
  }
  std::vector<double> head_sums(num_heads, 0.0);
#pragma omp parallel for schedule(static) if (parallel)
  for (int h = 0; h < num_heads; ++h) {
    Head& head = ensemble->heads[h];
    std::vector<double> row(batch.size());
    MlpGrad grad = ZerosLike(head.online);
    head_sums[h] = BackwardHead(head, h, batch, config, forwards[h], signal,
                                inv_norm, row.data(), &grad);
    AdamUpdate(grad, &head.adam, &head.online);
    ++head.step;
    SyncTarget(config, &head);
  }
  double total = 0.0;
  for (double s : head_sums) total += s;
  return 0.5 * total * inv_norm;
}

}  // namespace tdulab
