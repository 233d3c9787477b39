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

#ifndef TDULAB_AGENTS_ENSEMBLE_H_
#define TDULAB_AGENTS_ENSEMBLE_H_

#include <cstdint>
#include <vector>

#include "tdulab/agents/config.h"
#include "tdulab/nn/adam.h"
#include "tdulab/nn/mlp.h"
#include "tdulab/nn/rng.h"

namespace tdulab {

struct Head {
  MlpParams online;
  MlpParams target;
  MlpParams prior;         // fixed
  MlpParams prior_target;  // fixed unless target syncs copy the prior
  AdamState adam;
  int64_t step = 0;  // optimizer steps taken by this head
};

// Heads [0, K) are exploiters, heads [K, K + N) are explorers.
struct EnsembleState {
  std::vector<Head> heads;
  int num_exploiters = 0;
  int num_explorers = 0;
  int active_head = 0;

  int size() const { return static_cast<int>(heads.size()); }
  bool is_explorer(int head) const { return head >= num_exploiters; }
  bool operator==(const EnsembleState& other) const;
};

// Online networks and priors are drawn from independent child streams of
// init_rng; targets start as copies of the online networks.
EnsembleState InitEnsemble(const TduConfig& config, int observation_size,
                           int num_actions, const RngStream& init_rng);

}  // namespace tdulab

#endif  // TDULAB_AGENTS_ENSEMBLE_H_
