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

#ifndef TDULAB_BIAS_CONSTRUCTIONS_H_
#define TDULAB_BIAS_CONSTRUCTIONS_H_

#include <string>
#include <vector>

#include "tdulab/bias/moments.h"
#include "tdulab/nn/rng.h"

namespace tdulab {

// A belief, a posterior, and the transitions (s, a, s') whose ratios the
// construction controls.
struct BiasInstance {
  std::string name;
  MdpBelief belief;
  ParamPosterior posterior;
  std::vector<TransitionKey> designed;
};

// Random MDP with dense transitions and rewards in [-1, 1]; random policy.
TabularMdp RandomMdp(int num_states, int num_actions, double discount,
                     RngStream& rng);

// Belief over `belief_size` random MDPs on shared states; the posterior is
// the tabular push-forward, member i holding the exact Q of MDP i.
BiasInstance ConsistencyInstance(int num_states, int num_actions,
                                 int belief_size, double discount,
                                 RngStream& rng);

// Final-layer posterior over w in R^feature_dim with fixed random features on
// an MDP with many more state-action pairs than feature_dim + 1.
BiasInstance FinalLayerInstance(int num_states, int num_actions,
                                int feature_dim, int num_weights,
                                double discount, RngStream& rng);

// Two-state deterministic cycle with equal rewards in both states for every
// belief member, and a posterior whose members predict the same value in both
// states. Along s0 -> s1 every bias ratio equals 1.
BiasInstance SymmetricCycleInstance(double discount, RngStream& rng);

// Deterministic chain with posterior members Q^M + b where
// b(s_{k+1}) = ratio * b(s_k). Every chain transition has rho = ratio.
BiasInstance ScaledBiasChainInstance(int length, double ratio, double discount,
                                     RngStream& rng);

// Random MDPs, random belief, and a finite posterior equal to the belief
// members' Q plus a same-signed offset of random size per pair, so most (not
// all) transitions fall inside the mean-bias window.
BiasInstance RandomBiasInstance(int num_states, int num_actions,
                                double discount, RngStream& rng);

}  // namespace tdulab

#endif  // TDULAB_BIAS_CONSTRUCTIONS_H_
