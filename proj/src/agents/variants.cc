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

#include "tdulab/agents/variants.h"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "tdulab/agents/td.h"

namespace tdulab {

double QuSigma(std::span<const double> q_values_per_head) {
  return TduSigma(q_values_per_head);
}

double CountTable::Bonus(int64_t state, int action) const {
  return 1.0 / std::sqrt(static_cast<double>(Count(state, action)) + 0.01);
}

void CountTable::Visit(int64_t state, int action) { ++counts_[Key(state, action)]; }

int64_t CountTable::Count(int64_t state, int action) const {
  const auto it = counts_.find(Key(state, action));
  return it == counts_.end() ? 0 : it->second;
}

int64_t StateIndex(std::span<const double> observation) {
  for (std::size_t i = 0; i < observation.size(); ++i) {
    if (observation[i] != 0.0) return static_cast<int64_t>(i);
  }
  return -1;
}

double BanditState::Value(int head) const {
  return pulls[head] == 0 ? 0.0 : reward_sum[head] / static_cast<double>(pulls[head]);
}

void BanditState::Record(int head, double reward) {
  reward_sum[head] += reward;
  ++pulls[head];
  ++total_steps;
}

int BanditSelectHead(const BanditState& state, double eta) {
  const int num_heads = static_cast<int>(state.pulls.size());
  if (num_heads == 0) throw std::invalid_argument("BanditSelectHead: no arms");
  for (int k = 0; k < num_heads; ++k) {
    if (state.pulls[k] == 0) return k;
  }
  const double log_n = std::log(static_cast<double>(state.total_steps));
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < num_heads; ++k) {
    const double score =
        state.Value(k) +
        eta * std::sqrt(log_n / static_cast<double>(state.pulls[k]));
    if (score > best_score) {
      best_score = score;
      best = k;
    }
  }
  return best;
}

int UcbAction(const EnsembleState& ensemble, std::span<const double> observation,
              double beta, double prior_scale) {
  const int num_heads = ensemble.size();
  Eigen::MatrixXd q(0, num_heads);
  for (int h = 0; h < num_heads; ++h) {
    const Eigen::VectorXd qh = QValues(ensemble.heads[h], observation, prior_scale);
    if (h == 0) q.resize(qh.size(), num_heads);
    q.col(h) = qh;
  }
  Eigen::VectorXd score(q.rows());
  std::vector<double> row(num_heads);
  for (Eigen::Index a = 0; a < q.rows(); ++a) {
    for (int h = 0; h < num_heads; ++h) row[h] = q(a, h);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= num_heads;
    score[a] = mean + beta * QuSigma(row);
  }
  return GreedyAction(score);
}

}  // namespace tdulab
