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

#ifndef TDULAB_AGENTS_CONFIG_H_
#define TDULAB_AGENTS_CONFIG_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tdulab {

// tdu: explorers train on r + beta * std of exploiter TD errors.
// bdqn: every head trains on extrinsic reward (beta ignored).
// qu: explorers train on r + beta * std of exploiter Q(s, a).
// q_ucb: every head trains on extrinsic reward; acting maximizes
//   mean Q + beta * std Q over the ensemble.
// qex: explorers train on r + beta * |mean exploiter TD error|.
// cts: every head trains on r + beta * (count(s, a) + 0.01)^-1/2.
// tdu_bandit: tdu loss, heads chosen by UCB1 instead of uniformly.
enum class Variant { kTdu, kBdqn, kQu, kQUcb, kQex, kCts, kTduBandit };

std::string VariantName(Variant variant);
std::optional<Variant> ParseVariant(std::string_view name);

struct TduConfig {
  Variant variant = Variant::kTdu;
  int num_exploiters = 10;  // K
  int num_explorers = 10;   // N
  double beta = 1.0;
  double prior_scale = 3.0;  // lambda
  double discount = 0.99;    // gamma
  double mask_probability = 1.0;
  double noise_scale = 0.0;
  int batch_size = 32;
  double learning_rate = 1e-3;
  int sgd_period = 1;
  // Counted in optimizer steps of each head.
  int target_update_period = 4;
  int min_replay_size = 128;
  int replay_capacity = 10000;
  std::vector<int> hidden_sizes = {64, 64};
  bool double_dqn = true;
  double epsilon = 0.0;
  // Target syncs also copy the prior into the target prior, as a whole-tree
  // parameter copy does.
  bool sync_target_prior = true;
  double bandit_eta = 8.0;

  int ensemble_size() const { return num_exploiters + num_explorers; }
  // Throws std::invalid_argument naming the offending field.
  void Validate() const;
};

}  // namespace tdulab

#endif  // TDULAB_AGENTS_CONFIG_H_
