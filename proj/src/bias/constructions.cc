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

#include "tdulab/bias/constructions.h"

#include <cmath>
#include <stdexcept>

namespace tdulab {
namespace {

std::vector<double> RandomSimplex(int n, RngStream& rng) {
  std::vector<double> p(n);
  double sum = 0.0;
  for (double& v : p) {
    v = 0.1 + rng.Uniform();
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

MdpBelief RandomBelief(int num_states, int num_actions, int size,
                       double discount, RngStream& rng) {
  MdpBelief belief;
  for (int i = 0; i < size; ++i) {
    belief.mdps.push_back(RandomMdp(num_states, num_actions, discount, rng));
  }
  for (TabularMdp& m : belief.mdps) m.policy = belief.mdps.front().policy;
  belief.probabilities = RandomSimplex(size, rng);
  return belief;
}

// Chain-shaped MDP: s_k -> s_{k+1}, the last state absorbing.
TabularMdp ChainMdp(int length, double discount, RngStream& rng) {
  TabularMdp mdp = MakeTabularMdp(length, 1, discount);
  for (int s = 0; s < length; ++s) {
    mdp.P(s, 0, std::min(s + 1, length - 1)) = 1.0;
    mdp.R(s, 0) = rng.Uniform(-0.1, 0.1);
  }
  return mdp;
}

}  // namespace

TabularMdp RandomMdp(int num_states, int num_actions, double discount,
                     RngStream& rng) {
  TabularMdp mdp = MakeTabularMdp(num_states, num_actions, discount);
  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < num_actions; ++a) {
      const std::vector<double> row = RandomSimplex(num_states, rng);
      for (int t = 0; t < num_states; ++t) mdp.P(s, a, t) = row[t];
      mdp.R(s, a) = rng.Uniform(-1.0, 1.0);
    }
    mdp.policy[s] = static_cast<int>(rng.UniformInt(num_actions));
  }
  return mdp;
}

BiasInstance ConsistencyInstance(int num_states, int num_actions,
                                 int belief_size, double discount,
                                 RngStream& rng) {
  BiasInstance inst;
  inst.name = "consistency";
  inst.belief =
      RandomBelief(num_states, num_actions, belief_size, discount, rng);
  std::vector<QTable> q;
  for (const TabularMdp& m : inst.belief.mdps) q.push_back(ExactQ(m));
  inst.posterior = TabularPosterior(q, inst.belief.probabilities);
  for (int i = 0; i < belief_size; ++i) inst.posterior.paired_member.push_back(i);
  return inst;
}

BiasInstance FinalLayerInstance(int num_states, int num_actions,
                                int feature_dim, int num_weights,
                                double discount, RngStream& rng) {
  BiasInstance inst;
  inst.name = "final_layer";
  inst.belief = RandomBelief(num_states, num_actions, 3, discount, rng);
  const int pairs = num_states * num_actions;
  std::vector<double> features(static_cast<std::size_t>(pairs) * feature_dim);
  for (double& f : features) f = rng.Normal();
  std::vector<std::vector<double>> weights(num_weights,
                                           std::vector<double>(feature_dim));
  for (auto& w : weights) {
    for (double& v : w) v = rng.Normal();
  }
  inst.posterior = FinalLayerPosterior(
      pairs, feature_dim, std::move(features), std::move(weights),
      std::vector<double>(num_weights, 1.0 / num_weights));
  return inst;
}

BiasInstance SymmetricCycleInstance(double discount, RngStream& rng) {
  BiasInstance inst;
  inst.name = "symmetric_cycle";
  constexpr int kMembers = 3;
  for (int i = 0; i < kMembers; ++i) {
    TabularMdp m = MakeTabularMdp(2, 1, discount);
    m.P(0, 0, 1) = 1.0;
    m.P(1, 0, 0) = 1.0;
    const double r = rng.Uniform(0.0, 1.0) * (1.0 - discount);
    m.R(0, 0) = r;
    m.R(1, 0) = r;
    inst.belief.mdps.push_back(m);
  }
  inst.belief.probabilities = RandomSimplex(kMembers, rng);
  // Members predict one value for both states; the spread differs from the
  // belief's so the moment biases are nonzero.
  std::vector<QTable> q;
  for (int j = 0; j < 4; ++j) {
    const double v = rng.Uniform(0.2, 1.5);
    q.push_back({v, v});
  }
  inst.posterior = TabularPosterior(q, RandomSimplex(4, rng));
  const double r_mean = [&] {
    double s = 0.0;
    for (int i = 0; i < kMembers; ++i) {
      s += inst.belief.probabilities[i] * inst.belief.mdps[i].R(0, 0);
    }
    return s;
  }();
  inst.designed = {{0, 0, 1, 0, r_mean}, {1, 0, 0, 0, r_mean}};
  return inst;
}

BiasInstance ScaledBiasChainInstance(int length, double ratio, double discount,
                                     RngStream& rng) {
  if (length < 2) {
    throw std::invalid_argument("ScaledBiasChainInstance: length < 2");
  }
  BiasInstance inst;
  inst.name = "scaled_bias_chain";
  constexpr int kMembers = 3;
  for (int i = 0; i < kMembers; ++i) {
    inst.belief.mdps.push_back(ChainMdp(length, discount, rng));
  }
  inst.belief.probabilities = RandomSimplex(kMembers, rng);
  std::vector<double> offset(length);
  offset[0] = 0.1 * (rng.Bernoulli(0.5) ? 1.0 : -1.0);
  for (int s = 1; s < length; ++s) offset[s] = offset[s - 1] * ratio;
  std::vector<QTable> q;
  for (const TabularMdp& m : inst.belief.mdps) {
    QTable table = ExactQ(m);
    for (int s = 0; s < length; ++s) table[s] += offset[s];
    q.push_back(std::move(table));
  }
  inst.posterior = TabularPosterior(q, inst.belief.probabilities);
  const TabularMdp mix = inst.belief.Mixture();
  for (int s = 0; s + 1 < length; ++s) {
    inst.designed.push_back({s, 0, s + 1, 0, mix.R(s, 0)});
  }
  return inst;
}

BiasInstance RandomBiasInstance(int num_states, int num_actions,
                                double discount, RngStream& rng) {
  BiasInstance inst;
  inst.name = "random";
  const int members = 2 + static_cast<int>(rng.UniformInt(3));
  inst.belief = RandomBelief(num_states, num_actions, members, discount, rng);
  const int pairs = num_states * num_actions;
  const double sign = rng.Bernoulli(0.5) ? 1.0 : -1.0;
  std::vector<double> bias(pairs);
  for (double& b : bias) b = sign * rng.Uniform(0.2, 1.0);
  // Per-member perturbations with zero weighted mean, so the posterior mean
  // bias is exactly `bias` up to rounding while the variances differ.
  std::vector<QTable> q;
  std::vector<std::vector<double>> noise(members, std::vector<double>(pairs));
  for (auto& z : noise) {
    for (double& v : z) v = 0.3 * rng.Normal();
  }
  for (int p = 0; p < pairs; ++p) {
    double m = 0.0;
    for (int i = 0; i < members; ++i) {
      m += inst.belief.probabilities[i] * noise[i][p];
    }
    for (int i = 0; i < members; ++i) noise[i][p] -= m;
  }
  for (int i = 0; i < members; ++i) {
    QTable table = ExactQ(inst.belief.mdps[i]);
    for (int p = 0; p < pairs; ++p) table[p] += bias[p] + noise[i][p];
    q.push_back(std::move(table));
  }
  inst.posterior = TabularPosterior(q, inst.belief.probabilities);
  return inst;
}

}  // namespace tdulab
