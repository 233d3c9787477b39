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

#include "tdulab/bias/tabular_mdp.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace tdulab {
namespace {

constexpr double kSumTolerance = 1e-12;

}  // namespace

void TabularMdp::Validate() const {
  if (num_states <= 0 || num_actions <= 0) {
    throw std::invalid_argument("TabularMdp: empty state or action space");
  }
  const std::size_t pairs = static_cast<std::size_t>(num_pairs());
  if (transitions.size() != pairs * num_states) {
    throw std::invalid_argument("TabularMdp: transition table has size " +
                                std::to_string(transitions.size()));
  }
  if (rewards.size() != pairs) {
    throw std::invalid_argument("TabularMdp: reward table size mismatch");
  }
  if (!reward_stddev.empty() && reward_stddev.size() != pairs) {
    throw std::invalid_argument("TabularMdp: reward stddev size mismatch");
  }
  if (!(discount >= 0.0 && discount <= 1.0)) {
    throw std::invalid_argument("TabularMdp: discount must lie in [0, 1]");
  }
  if (policy.size() != static_cast<std::size_t>(num_states)) {
    throw std::invalid_argument("TabularMdp: policy size mismatch");
  }
  for (int s = 0; s < num_states; ++s) {
    if (policy[s] < 0 || policy[s] >= num_actions) {
      throw std::invalid_argument("TabularMdp: policy action out of range at "
                                  "state " + std::to_string(s));
    }
    for (int a = 0; a < num_actions; ++a) {
      if (!std::isfinite(R(s, a))) {
        throw std::invalid_argument("TabularMdp: non-finite reward");
      }
      double sum = 0.0;
      for (int t = 0; t < num_states; ++t) {
        const double p = P(s, a, t);
        if (!(p >= 0.0 && p <= 1.0)) {
          throw std::invalid_argument("TabularMdp: probability outside [0, 1]");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > kSumTolerance) {
        throw std::invalid_argument(
            "TabularMdp: transition row (" + std::to_string(s) + ", " +
            std::to_string(a) + ") sums to " + std::to_string(sum));
      }
    }
  }
}

TabularMdp MakeTabularMdp(int num_states, int num_actions, double discount) {
  if (num_states <= 0 || num_actions <= 0) {
    throw std::invalid_argument("MakeTabularMdp: sizes must be positive");
  }
  TabularMdp mdp;
  mdp.num_states = num_states;
  mdp.num_actions = num_actions;
  mdp.discount = discount;
  mdp.transitions.assign(
      static_cast<std::size_t>(num_states) * num_actions * num_states, 0.0);
  mdp.rewards.assign(static_cast<std::size_t>(num_states) * num_actions, 0.0);
  mdp.policy.assign(num_states, 0);
  return mdp;
}

QTable ExactQ(const TabularMdp& mdp) {
  mdp.Validate();
  const int n = mdp.num_pairs();
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd rhs(n);
  for (int s = 0; s < mdp.num_states; ++s) {
    for (int a = 0; a < mdp.num_actions; ++a) {
      const int row = mdp.pair(s, a);
      rhs[row] = mdp.R(s, a);
      for (int t = 0; t < mdp.num_states; ++t) {
        system(row, mdp.pair(t, mdp.policy[t])) -= mdp.discount * mdp.P(s, a, t);
      }
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  // (I - gamma P_pi) has eigenvalues with modulus >= 1 - gamma, so a rank
  // deficiency only appears with gamma = 1 and a closed recurrent class.
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    throw std::domain_error("ExactQ: Bellman system is singular");
  }
  const Eigen::VectorXd q = lu.solve(rhs);
  return QTable(q.data(), q.data() + n);
}

QTable BellmanBackup(const TabularMdp& mdp, const QTable& q) {
  if (q.size() != static_cast<std::size_t>(mdp.num_pairs())) {
    throw std::invalid_argument("BellmanBackup: Q table size mismatch");
  }
  QTable out(q.size());
  for (int s = 0; s < mdp.num_states; ++s) {
    for (int a = 0; a < mdp.num_actions; ++a) {
      double next = 0.0;
      for (int t = 0; t < mdp.num_states; ++t) {
        next += mdp.P(s, a, t) * q[mdp.pair(t, mdp.policy[t])];
      }
      out[mdp.pair(s, a)] = mdp.R(s, a) + mdp.discount * next;
    }
  }
  return out;
}

void MdpBelief::Validate() const {
  if (mdps.empty()) throw std::invalid_argument("MdpBelief: empty support");
  if (probabilities.size() != mdps.size()) {
    throw std::invalid_argument("MdpBelief: probability count mismatch");
  }
  double sum = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("MdpBelief: probability outside [0, 1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw std::invalid_argument("MdpBelief: probabilities sum to " +
                                std::to_string(sum));
  }
  const TabularMdp& first = mdps.front();
  for (const TabularMdp& m : mdps) {
    m.Validate();
    if (m.num_states != first.num_states ||
        m.num_actions != first.num_actions || m.discount != first.discount ||
        m.policy != first.policy) {
      throw std::invalid_argument(
          "MdpBelief: members differ in states, actions, discount or policy");
    }
  }
}

TabularMdp MdpBelief::Mixture() const {
  Validate();
  const TabularMdp& first = mdps.front();
  TabularMdp mix =
      MakeTabularMdp(first.num_states, first.num_actions, first.discount);
  mix.policy = first.policy;
  for (std::size_t i = 0; i < mdps.size(); ++i) {
    for (std::size_t k = 0; k < mix.transitions.size(); ++k) {
      mix.transitions[k] += probabilities[i] * mdps[i].transitions[k];
    }
    for (std::size_t k = 0; k < mix.rewards.size(); ++k) {
      mix.rewards[k] += probabilities[i] * mdps[i].rewards[k];
    }
  }
  return mix;
}

}  // namespace tdulab
