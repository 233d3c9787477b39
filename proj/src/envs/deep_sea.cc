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

#include "tdulab/envs/deep_sea.h"

#include <algorithm>
#include <string>

namespace tdulab {

DeepSeaEnv::DeepSeaEnv(int size, bool stochastic, RngStream map_rng,
                       RngStream dynamics_rng, double unscaled_move_cost)
    : size_(size),
      stochastic_(stochastic),
      move_cost_(unscaled_move_cost / size),
      dynamics_rng_(dynamics_rng) {
  if (size < 4) {
    throw std::invalid_argument("DeepSeaEnv: size must be >= 4, got " +
                                std::to_string(size));
  }
  action_map_.resize(static_cast<std::size_t>(size) * size);
  for (int& a : action_map_) a = map_rng.Bernoulli(0.5) ? 1 : 0;
  Reset();
}

int DeepSeaEnv::RightAction(int row, int column) const {
  return action_map_[static_cast<std::size_t>(row) * size_ + column];
}

std::vector<double> DeepSeaEnv::Reset() {
  row_ = 0;
  column_ = 0;
  done_ = false;
  return Observation();
}

std::vector<double> DeepSeaEnv::Observation() const {
  std::vector<double> obs(static_cast<std::size_t>(size_) * size_, 0.0);
  // The terminal observation reuses the last row.
  const int r = std::min(row_, size_ - 1);
  obs[static_cast<std::size_t>(r) * size_ + column_] = 1.0;
  return obs;
}

StepResult DeepSeaEnv::Step(int action) {
  if (done_) throw ContractViolation("DeepSeaEnv::Step after episode end");
  if (action != 0 && action != 1) {
    throw std::invalid_argument("DeepSeaEnv::Step: action must be 0 or 1");
  }
  const bool intended_right = action == RightAction(row_, column_);
  bool executed_right = intended_right;
  if (stochastic_) {
    // One draw per step keeps the dynamics stream aligned across policies.
    if (dynamics_rng_.Uniform() < 1.0 / size_) executed_right = !executed_right;
  }
  StepResult result;
  if (intended_right) result.reward -= move_cost_;
  if (executed_right) {
    if (row_ == size_ - 1 && column_ == size_ - 1) result.reward += 1.0;
    column_ = std::min(column_ + 1, size_ - 1);
  } else {
    column_ = std::max(column_ - 1, 0);
  }
  ++row_;
  done_ = row_ == size_;
  result.episode_done = done_;
  result.discount = done_ ? 0.0 : 1.0;
  result.observation = Observation();
  return result;
}

double DeepSeaEnv::OptimalReturn() const {
  return DeepSeaOptimalReturn(size_, stochastic_, move_cost_ * size_);
}

double DeepSeaOptimalReturn(int size, bool stochastic,
                            double unscaled_move_cost) {
  const double cost = unscaled_move_cost / size;
  const double flip = stochastic ? 1.0 / size : 0.0;
  // next[c] = optimal value-to-go from (row + 1, c).
  std::vector<double> next(size, 0.0), current(size, 0.0);
  for (int row = size - 1; row >= 0; --row) {
    for (int c = 0; c <= std::min(row, size - 1); ++c) {
      const int right = std::min(c + 1, size - 1);
      const int left = std::max(c - 1, 0);
      const double bonus = (row == size - 1 && c == size - 1) ? 1.0 : 0.0;
      const double go_right = bonus + next[right];
      const double go_left = next[left];
      const double q_right = -cost + (1.0 - flip) * go_right + flip * go_left;
      const double q_left = (1.0 - flip) * go_left + flip * go_right;
      current[c] = std::max(q_right, q_left);
    }
    std::swap(next, current);
  }
  return next[0];
}

}  // namespace tdulab
