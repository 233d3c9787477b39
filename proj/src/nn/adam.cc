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

#include "tdulab/nn/adam.h"

#include <cmath>
#include <stdexcept>

namespace tdulab {

AdamState AdamInit(const MlpParams& params, AdamOptions options) {
  AdamState state;
  state.first_moment = ZerosLike(params);
  state.second_moment = ZerosLike(params);
  state.options = options;
  return state;
}


void AdamUpdate(const MlpGrad& grad, AdamState* state, MlpParams* params) {
  if (grad.layers.size() != params->layers.size() ||
      state->first_moment.layers.size() != params->layers.size()) {
    throw std::invalid_argument("AdamUpdate: shape mismatch");
  }
  const AdamOptions& o = state->options;
  state->step += 1;
  const double t = static_cast<double>(state->step);
  const double correction1 = 1.0 - std::pow(o.beta1, t);
  const double correction2 = 1.0 - std::pow(o.beta2, t);
  const double step_size = o.learning_rate / correction1;
  for (std::size_t i = 0; i < params->layers.size(); ++i) {
    auto& p = params->layers[i];
    auto& m = state->first_moment.layers[i];
    auto& v = state->second_moment.layers[i];
    const auto& g = grad.layers[i];
    if (g.weight.rows() != p.weight.rows() || g.weight.cols() != p.weight.cols()) {
      throw std::invalid_argument("AdamUpdate: layer shape mismatch");
    }
    auto pw = p.weight.array();
    auto mw = m.weight.array();
    auto vw = v.weight.array();
    mw = o.beta1 * mw + (1.0 - o.beta1) * g.weight.array();
    vw = o.beta2 * vw + (1.0 - o.beta2) * g.weight.array().square();
    pw -= step_size * mw / ((vw / correction2).sqrt() + o.epsilon);
    auto pb = p.bias.array();
    auto mb = m.bias.array();
    auto vb = v.bias.array();
    mb = o.beta1 * mb + (1.0 - o.beta1) * g.bias.array();
    vb = o.beta2 * vb + (1.0 - o.beta2) * g.bias.array().square();
    pb -= step_size * mb / ((vb / correction2).sqrt() + o.epsilon);
  }
}

std::pair<MlpParams, AdamState> AdamStep(const MlpParams& params,
                                         const MlpGrad& grad,
                                         const AdamState& state) {
  std::pair<MlpParams, AdamState> result{params, state};
  AdamUpdate(grad, &result.second, &result.first);
  return result;
}

}  // namespace tdulab
