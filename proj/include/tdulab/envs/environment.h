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

#ifndef TDULAB_ENVS_ENVIRONMENT_H_
#define TDULAB_ENVS_ENVIRONMENT_H_

#include <stdexcept>
#include <string>
#include <vector>

namespace tdulab {

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  // 0 at episode end, 1 otherwise; the agent applies gamma.
  double discount = 1.0;
  bool episode_done = false;
};

// Raised when an operation is called outside its contract, e.g. stepping a
// finished episode.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Episodic two-action environment with a known optimal expected return.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::vector<double> Reset() = 0;
  virtual StepResult Step(int action) = 0;
  virtual int observation_size() const = 0;
  virtual int num_actions() const { return 2; }
  virtual double OptimalReturn() const = 0;
  virtual bool episode_done() const = 0;
  // "deep_sea", "deep_sea_stochastic" or "binary_tree".
  virtual std::string name() const = 0;
  // N for Deep Sea, L for the tree.
  virtual int size() const = 0;
};

}  // namespace tdulab

#endif  // TDULAB_ENVS_ENVIRONMENT_H_
