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

#ifndef TDULAB_AGENTS_VARIANTS_H_
#define TDULAB_AGENTS_VARIANTS_H_

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "tdulab/agents/ensemble.h"

namespace tdulab {

// Sample std (Bessel) of per-head Q(s, a); the QU / Q+UCB signal.
double QuSigma(std::span<const double> q_values_per_head);

// Q-explore intrinsic reward.
inline double QexReward(double primary_td_error) {
  return primary_td_error < 0.0 ? -primary_td_error : primary_td_error;
}

// Exact visit counts over (state index, action).
class CountTable {
 public:
  // (count(s, a) + 0.01)^(-1/2) at the current count.
  double Bonus(int64_t state, int action) const;
  void Visit(int64_t state, int action);
  int64_t Count(int64_t state, int action) const;

 private:
  static int64_t Key(int64_t state, int action) { return state * 2 + action; }
  std::unordered_map<int64_t, int64_t> counts_;
};

// Index of the first nonzero coordinate; exact for one-hot observations.
int64_t StateIndex(std::span<const double> observation);

// UCB1 over ensemble heads. Values are running means of per-step rewards
// collected while a head was active; counts are environment steps.
struct BanditState {
  std::vector<double> reward_sum;
  std::vector<int64_t> pulls;
  int64_t total_steps = 0;

  explicit BanditState(int num_heads = 0)
      : reward_sum(num_heads, 0.0), pulls(num_heads, 0) {}
  double Value(int head) const;
  void Record(int head, double reward);
};

// Unpulled heads first (lowest index), then argmax V + eta sqrt(log n / n_k)
// with ties to the lowest index.
int BanditSelectHead(const BanditState& state, double eta);

// argmax_a mean_h Q_h(s, a) + beta * std_h Q_h(s, a) over all heads.
int UcbAction(const EnsembleState& ensemble, std::span<const double> observation,
              double beta, double prior_scale);

}  // namespace tdulab

#endif  // TDULAB_AGENTS_VARIANTS_H_
