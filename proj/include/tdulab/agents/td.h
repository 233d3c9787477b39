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

// Per-head value and TD-error primitives shared by the ensemble kernels, the
// serial reference path and the acting code. Every TD error in the library is
// formed as (reward + bootstrap) - q_sa so that independent code paths round
// identically.

#ifndef TDULAB_AGENTS_TD_H_
#define TDULAB_AGENTS_TD_H_

#include <optional>
#include <span>

#include <Eigen/Dense>

#include "tdulab/agents/config.h"
#include "tdulab/agents/ensemble.h"
#include "tdulab/replay/replay_buffer.h"

namespace tdulab {

// online(obs) + prior_scale * prior(obs).
Eigen::VectorXd QValues(const Head& head, std::span<const double> observation,
                        double prior_scale);
// target(obs) + prior_scale * prior_target(obs).
Eigen::VectorXd TargetQValues(const Head& head,
                              std::span<const double> observation,
                              double prior_scale);

// Ties go to the lowest action index.
int GreedyAction(const Eigen::Ref<const Eigen::VectorXd>& q);

// discount * gamma * Q_target(s', a*), with a* the online argmax under double
// DQN and the target argmax otherwise. Zero at terminal transitions.
double BootstrapValue(const Head& head, const Transition& transition,
                      const TduConfig& config);

inline double TdErrorFrom(double reward, double bootstrap, double q_sa) {
  return (reward + bootstrap) - q_sa;
}

// d/dQ(s, a) of mask * delta^2 * inv_norm / 2.
inline double TdOutputGradient(double mask, double delta, double inv_norm) {
  return -(mask * delta) * inv_norm;
}

// delta = r + discount * gamma * Q_target(s', a*) - Q(s, a). The override
// replaces r, e.g. with an augmented or noise-perturbed reward.
double TdError(const Head& head, const Transition& transition,
               const TduConfig& config,
               std::optional<double> reward_override = std::nullopt);

// Sample standard deviation with Bessel correction. Throws
// std::invalid_argument for fewer than two values.
double TduSigma(std::span<const double> td_errors);

}  // namespace tdulab

#endif  // TDULAB_AGENTS_TD_H_
