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

#include "tdulab/agents/td.h"

#include <cmath>
#include <stdexcept>

namespace tdulab {

Eigen::VectorXd QValues(const Head& head, std::span<const double> observation,
                        double prior_scale) {
  Eigen::VectorXd q = MlpForward(head.online, observation);
  if (prior_scale != 0.0) q += prior_scale * MlpForward(head.prior, observation);
  return q;
}

Eigen::VectorXd TargetQValues(const Head& head,
                              std::span<const double> observation,
                              double prior_scale) {
  Eigen::VectorXd q = MlpForward(head.target, observation);
  if (prior_scale != 0.0) {
    q += prior_scale * MlpForward(head.prior_target, observation);
  }
  return q;
}

int GreedyAction(const Eigen::Ref<const Eigen::VectorXd>& q) {
  int best = 0;
  for (int a = 1; a < q.size(); ++a) {
    if (q[a] > q[best]) best = a;
  }
  return best;
}

double BootstrapValue(const Head& head, const Transition& transition,
                      const TduConfig& config) {
  if (transition.discount == 0.0) return 0.0;
  const Eigen::VectorXd q_target =
      TargetQValues(head, transition.next_observation, config.prior_scale);
  const int next_action =
      config.double_dqn
          ? GreedyAction(QValues(head, transition.next_observation,
                                 config.prior_scale))
          : GreedyAction(q_target);
  return transition.discount * config.discount * q_target[next_action];
}

double TdError(const Head& head, const Transition& transition,
               const TduConfig& config, std::optional<double> reward_override) {
  const double q_sa =
      QValues(head, transition.observation, config.prior_scale)[transition.action];
  const double reward = reward_override.value_or(transition.reward);
  return TdErrorFrom(reward, BootstrapValue(head, transition, config), q_sa);
}

double TduSigma(std::span<const double> td_errors) {
  const std::size_t k = td_errors.size();
  if (k < 2) {
    throw std::invalid_argument("TduSigma: need at least two TD errors");
  }
  double mean = 0.0;
  for (double d : td_errors) mean += d;
  mean /= static_cast<double>(k);
  double sum_sq = 0.0;
  for (double d : td_errors) sum_sq += (d - mean) * (d - mean);
  return std::sqrt(sum_sq / static_cast<double>(k - 1));
}

}  // namespace tdulab
