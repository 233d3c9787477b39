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

#include "tdulab/agents/ensemble.h"

namespace tdulab {

bool EnsembleState::operator==(const EnsembleState& other) const {
  if (num_exploiters != other.num_exploiters ||
      num_explorers != other.num_explorers ||
      active_head != other.active_head || heads.size() != other.heads.size()) {
    return false;
  }
  for (std::size_t i = 0; i < heads.size(); ++i) {
    const Head& a = heads[i];
    const Head& b = other.heads[i];
    if (!(a.online == b.online) || !(a.target == b.target) ||
        !(a.prior == b.prior) || !(a.prior_target == b.prior_target) ||
        a.step != b.step || a.adam.step != b.adam.step ||
        !(a.adam.first_moment == b.adam.first_moment) ||
        !(a.adam.second_moment == b.adam.second_moment)) {
      return false;
    }
  }
  return true;
}

EnsembleState InitEnsemble(const TduConfig& config, int observation_size,
                           int num_actions, const RngStream& init_rng) {
  config.Validate();
  std::vector<int> sizes;
  sizes.push_back(observation_size);
  sizes.insert(sizes.end(), config.hidden_sizes.begin(),
               config.hidden_sizes.end());
  sizes.push_back(num_actions);

  EnsembleState ensemble;
  ensemble.num_exploiters = config.num_exploiters;
  ensemble.num_explorers = config.num_explorers;
  const AdamOptions adam{.learning_rate = config.learning_rate};
  for (int h = 0; h < config.ensemble_size(); ++h) {
    RngStream head_rng = init_rng.Split(static_cast<uint64_t>(h));
    RngStream online_rng = head_rng.Split("online");
    RngStream prior_rng = head_rng.Split("prior");
    RngStream prior_target_rng = head_rng.Split("prior_target");
    Head head;
    head.online = MlpInit(sizes, online_rng);
    head.target = head.online;
    head.prior = MlpInit(sizes, prior_rng);
    head.prior_target = MlpInit(sizes, prior_target_rng);
    head.adam = AdamInit(head.online, adam);
    ensemble.heads.push_back(std::move(head));
  }
  return ensemble;
}

}  // namespace tdulab
