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

#ifndef TDULAB_ENVS_DEEP_SEA_H_
#define TDULAB_ENVS_DEEP_SEA_H_

#include <vector>

#include "tdulab/envs/environment.h"
#include "tdulab/nn/rng.h"

namespace tdulab {

// N x N Deep Sea. The agent starts top-left and descends one row per step.
// A per-cell action map decides which raw action means "right"; moving right
// costs move_cost = unscaled_move_cost / N, moving left drifts the column
// toward 0. Executing "right" from the bottom-right cell pays +1. In the
// stochastic variant each step's executed direction is inverted with
// probability 1/N; rewards follow the intended move except the goal bonus,
// which requires the executed move.
class DeepSeaEnv : public Environment {
 public:
  // map_rng draws the action map once; dynamics_rng drives stochastic moves.
  DeepSeaEnv(int size, bool stochastic, RngStream map_rng,
             RngStream dynamics_rng, double unscaled_move_cost = 0.01);

  std::vector<double> Reset() override;
  StepResult Step(int action) override;
  int observation_size() const override { return size_ * size_; }
  double OptimalReturn() const override;
  bool episode_done() const override { return done_; }
  std::string name() const override {
    return stochastic_ ? "deep_sea_stochastic" : "deep_sea";
  }
  int size() const override { return size_; }

  bool stochastic() const { return stochastic_; }
  double move_cost() const { return move_cost_; }
  double bad_transition_probability() const {
    return stochastic_ ? 1.0 / size_ : 0.0;
  }
  int row() const { return row_; }
  int column() const { return column_; }
  // Raw action that means "right" at (row, column).
  int RightAction(int row, int column) const;

 private:
  std::vector<double> Observation() const;

  int size_;
  bool stochastic_;
  double move_cost_;
  std::vector<int> action_map_;  // row-major size x size
  RngStream dynamics_rng_;
  int row_ = 0;
  int column_ = 0;
  bool done_ = false;
};

// Exact optimal expected return by backward induction over (row, column).
double DeepSeaOptimalReturn(int size, bool stochastic,
                            double unscaled_move_cost = 0.01);

}  // namespace tdulab

#endif  // TDULAB_ENVS_DEEP_SEA_H_
