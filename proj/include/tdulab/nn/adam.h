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

#ifndef TDULAB_NN_ADAM_H_
#define TDULAB_NN_ADAM_H_

#include <cstdint>
#include <utility>

#include "tdulab/nn/mlp.h"

namespace tdulab {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  MlpParams first_moment;
  MlpParams second_moment;
  int64_t step = 0;
  AdamOptions options;
};

AdamState AdamInit(const MlpParams& params, AdamOptions options = {});

// Bias-corrected Adam, epsilon added outside the square root.
void AdamUpdate(const MlpGrad& grad, AdamState* state, MlpParams* params);

std::pair<MlpParams, AdamState> AdamStep(const MlpParams& params,
                                         const MlpGrad& grad,
                                         const AdamState& state);

}  // namespace tdulab

#endif  // TDULAB_NN_ADAM_H_
