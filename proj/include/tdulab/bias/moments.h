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

#ifndef TDULAB_BIAS_MOMENTS_H_
#define TDULAB_BIAS_MOMENTS_H_

#include <vector>

#include "tdulab/bias/tabular_mdp.h"
#include "tdulab/nn/rng.h"

namespace tdulab {

enum class PosteriorStructure { kFinalLayerOnly, kFullyFactorised, kFull };

// Distribution over linear value functions Q_w(s, a) = w . phi(s, a) with a
// fixed feature map. Either a finite weighted set of weight vectors or a
// Gaussian over w. Tabular posteriors use one-hot features.
//
// A finite posterior may be paired with a belief: member i then stands for
// MDP paired_member[i], and the Bellman right-hand side of that member uses
// its own MDP. Unpaired posteriors (and all Gaussian ones) use the belief's
// mixture MDP.
struct ParamPosterior {
  PosteriorStructure structure = PosteriorStructure::kFull;
  int num_pairs = 0;
  int feature_dim = 0;
  std::vector<double> features;  // [pair][feature_dim]

  std::vector<std::vector<double>> weights;
  std::vector<double> probabilities;
  std::vector<int> paired_member;

  bool gaussian = false;
  std::vector<double> mean;        // [feature_dim]
  std::vector<double> covariance;  // [feature_dim][feature_dim]

  bool paired() const { return !paired_member.empty(); }
  double Feature(int pair, int i) const {
    return features[static_cast<std::size_t>(pair) * feature_dim + i];
  }
  // Q values of a weight vector at every pair.
  QTable Values(const std::vector<double>& w) const;

  // Throws std::invalid_argument on shape errors, bad probabilities, a
  // non-symmetric covariance, or pairing indices outside [0, belief_size).
  void Validate(int belief_size) const;
};

// One-hot features, one member per Q table.
ParamPosterior TabularPosterior(const std::vector<QTable>& q_tables,
                                std::vector<double> probabilities);
ParamPosterior FinalLayerPosterior(int num_pairs, int feature_dim,
                                   std::vector<double> features,
                                   std::vector<std::vector<double>> weights,
                                   std::vector<double> probabilities);
ParamPosterior GaussianLinearPosterior(int num_pairs, int feature_dim,
                                       std::vector<double> features,
                                       std::vector<double> mean,
                                       std::vector<double> covariance);

// Draws weight vectors. Finite posteriors sample members by probability;
// Gaussian ones use a symmetric square root of the covariance, so a
// positive semi-definite covariance is enough.
std::vector<std::vector<double>> SampleWeights(const ParamPosterior& posterior,
                                               int count, RngStream& rng);

struct BeliefMomentTables {
  std::vector<QTable> q;  // exact Q per belief member
  std::vector<double> mean;
  std::vector<double> variance;
  std::vector<double> second;  // E_M[Q^2]
};

BeliefMomentTables BeliefMoments(const MdpBelief& belief);

// A transition tau = (s, a, r, s') with a' = pi(s'). The reward is the
// mixture mean reward of (s, a).
struct TransitionKey {
  int state = 0;
  int action = 0;
  int next_state = 0;
  int next_action = 0;
  double reward = 0.0;
};

// Every (s, a, s') with positive mixture probability, in (s, a, s') order.
std::vector<TransitionKey> EnumerateTransitions(const MdpBelief& belief);

struct DeltaMoments {
  double mean = 0.0;      // E[delta | tau]
  double variance = 0.0;  // V[delta | tau]
  double cross = 0.0;     // E[Q(s', a') Q(s, a)]
};

struct PosteriorMomentTables {
  std::vector<double> mean;
  std::vector<double> variance;
  std::vector<double> second;
  // Moments of the Bellman backup of Q_theta (right-hand side of the moment
  // propagation conditions).
  std::vector<double> backup_mean;
  std::vector<double> backup_variance;
  std::vector<TransitionKey> transitions;
  std::vector<DeltaMoments> deltas;
};

// Exact moments: enumeration for finite posteriors, closed form for
// Gaussian ones.
PosteriorMomentTables PosteriorMoments(const ParamPosterior& posterior,
                                       const MdpBelief& belief);

// Belief-side moments of delta^M(tau) for the same transitions.
std::vector<DeltaMoments> BeliefDeltaMoments(
    const MdpBelief& belief, const BeliefMomentTables& moments,
    const std::vector<TransitionKey>& transitions);

}  // namespace tdulab

#endif  // TDULAB_BIAS_MOMENTS_H_
