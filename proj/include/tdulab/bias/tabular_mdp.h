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

#ifndef TDULAB_BIAS_TABULAR_MDP_H_
#define TDULAB_BIAS_TABULAR_MDP_H_

#include <vector>

namespace tdulab {

// Finite MDP with a fixed deterministic evaluation policy. Rewards are given
// by their mean; a reward standard deviation may be attached for samplers but
// never enters exact computations.
struct TabularMdp {
  int num_states = 0;
  int num_actions = 0;
  double discount = 0.0;
  std::vector<double> transitions;    // [s][a][s'], row-major
  std::vector<double> rewards;        // [s][a]
  std::vector<double> reward_stddev;  // [s][a] or empty
  std::vector<int> policy;            // [s]

  int num_pairs() const { return num_states * num_actions; }
  int pair(int s, int a) const { return s * num_actions + a; }
  double P(int s, int a, int next) const {
    return transitions[(static_cast<std::size_t>(s) * num_actions + a) *
                           num_states + next];
  }
  double& P(int s, int a, int next) {
    return transitions[(static_cast<std::size_t>(s) * num_actions + a) *
                           num_states + next];
  }
  double R(int s, int a) const { return rewards[pair(s, a)]; }
  double& R(int s, int a) { return rewards[pair(s, a)]; }

  // Throws std::invalid_argument: wrong table sizes, a probability outside
  // [0, 1], a row not summing to 1 (to 1e-12), discount outside [0, 1], or an
  // out-of-range policy action.
  void Validate() const;
};

// Zero rewards, zero transitions, policy all zeros.
TabularMdp MakeTabularMdp(int num_states, int num_actions, double discount);

// Q tables are indexed by TabularMdp::pair(s, a).
using QTable = std::vector<double>;

// Solves (I - gamma P_pi) Q = R directly. Throws std::domain_error when the
// system is singular (gamma = 1 with a recurrent chain).
QTable ExactQ(const TabularMdp& mdp);

// (T Q)(s, a) = R(s, a) + gamma * sum_s' P(s'|s, a) Q(s', pi(s')).
QTable BellmanBackup(const TabularMdp& mdp, const QTable& q);

// Finite-support belief over MDPs sharing states, actions, discount and
// evaluation policy.
struct MdpBelief {
  std::vector<TabularMdp> mdps;
  std::vector<double> probabilities;

  std::size_t size() const { return mdps.size(); }
  // Throws std::invalid_argument on an invalid member, mismatched shapes, a
  // negative probability, or probabilities not summing to 1 (to 1e-12).
  void Validate() const;
  // Probability-weighted mean transition kernel and mean reward.
  TabularMdp Mixture() const;
};

}  // namespace tdulab

#endif  // TDULAB_BIAS_TABULAR_MDP_H_
