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

#include "tdulab/envs/binary_tree.h"

#include <algorithm>
#include <string>

namespace tdulab {

BinaryTreeEnv::BinaryTreeEnv(int depth, RngStream map_rng) : depth_(depth) {
  if (depth < 1) {
    throw std::invalid_argument("BinaryTreeEnv: depth must be >= 1, got " +
                                std::to_string(depth));
  }
  action_map_.resize(depth);
  for (int& a : action_map_) a = map_rng.Bernoulli(0.5) ? 1 : 0;
  Reset();
}

std::vector<double> BinaryTreeEnv::Reset() {
  branch_ = 0;
  done_ = false;
  return Observation();
}

std::vector<double> BinaryTreeEnv::Observation() const {
  std::vector<double> obs(depth_, 0.0);
  obs[std::min(branch_, depth_ - 1)] = 1.0;
  return obs;
}

StepResult BinaryTreeEnv::Step(int action) {
  if (done_) throw ContractViolation("BinaryTreeEnv::Step after episode end");
  if (action != 0 && action != 1) {
    throw std::invalid_argument("BinaryTreeEnv::Step: action must be 0 or 1");
  }
  StepResult result;
  if (action != action_map_[branch_]) {
    done_ = true;
  } else if (branch_ == depth_ - 1) {
    done_ = true;
    result.reward = 1.0;
  } else {
    ++branch_;
  }
  result.episode_done = done_;
  result.discount = done_ ? 0.0 : 1.0;
  result.observation = Observation();
  return result;
}

}  // namespace tdulab
