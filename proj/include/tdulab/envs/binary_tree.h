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

#ifndef TDULAB_ENVS_BINARY_TREE_H_
#define TDULAB_ENVS_BINARY_TREE_H_

#include <vector>

#include "tdulab/envs/environment.h"
#include "tdulab/nn/rng.h"

namespace tdulab {

// Depth-L chain of branches. At each branch one raw action advances and the
// other ends the episode with reward 0; advancing past the last branch pays 1.
// Observations are one-hot over the L branches.
class BinaryTreeEnv : public Environment {
 public:
  BinaryTreeEnv(int depth, RngStream map_rng);

  std::vector<double> Reset() override;
  StepResult Step(int action) override;
  int observation_size() const override { return depth_; }
  double OptimalReturn() const override { return 1.0; }
  bool episode_done() const override { return done_; }
  std::string name() const override { return "binary_tree"; }
  int size() const override { return depth_; }

  int branch() const { return branch_; }
  int AdvanceAction(int branch) const { return action_map_[branch]; }

 private:
  std::vector<double> Observation() const;

  int depth_;
  std::vector<int> action_map_;
  int branch_ = 0;
  bool done_ = false;
};

}  // namespace tdulab

#endif  // TDULAB_ENVS_BINARY_TREE_H_
