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

// Feed-forward network core: dense layers, ReLU on hidden layers, identity
// output. Forward and backward passes skip exact-zero inputs, which makes
// one-hot observations cost a single column read in the first layer.

#ifndef TDULAB_NN_MLP_H_
#define TDULAB_NN_MLP_H_

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tdulab/nn/rng.h"

namespace tdulab {

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

struct MlpParams {
  std::vector<DenseLayer> layers;

  int input_size() const;
  int output_size() const;
  std::size_t num_parameters() const;
  std::vector<int> layer_sizes() const;

  // Throws std::invalid_argument if layer dimensions do not chain or any
  // entry is non-finite.
  void Validate() const;

  bool operator==(const MlpParams& other) const;
};

// Gradients share the parameter layout.
using MlpGrad = MlpParams;

enum class InitScheme { kHeUniform, kFixedScale };

struct InitOptions {
  InitScheme scheme = InitScheme::kHeUniform;
  // Half-width of the uniform weight distribution for kFixedScale.
  double scale = 0.1;
};

MlpParams MlpInit(std::span<const int> layer_sizes, RngStream& rng,
                  InitOptions options = {});

MlpParams ZerosLike(const MlpParams& params);

// Activations recorded by a forward pass: activations[0] is the input,
// activations[i] the post-activation output of layer i.
struct MlpTape {
  std::vector<Eigen::VectorXd> activations;
  const Eigen::VectorXd& output() const { return activations.back(); }
};

Eigen::VectorXd MlpForward(const MlpParams& params,
                           std::span<const double> input);
void MlpForward(const MlpParams& params, std::span<const double> input,
                MlpTape* tape);

// Accumulates d(loss)/d(params) into *grad given d(loss)/d(output).
void MlpBackward(const MlpParams& params, const MlpTape& tape,
                 const Eigen::Ref<const Eigen::VectorXd>& output_grad,
                 MlpGrad* grad);

// Scalar loss over a batch of network outputs (columns). Must return the loss
// and fill output_grads (same shape as outputs) with d(loss)/d(outputs).
// Anything the loss treats as a constant is a stop-gradient quantity.
using BatchLoss = std::function<double(const Eigen::MatrixXd& outputs,
                                       Eigen::MatrixXd* output_grads)>;

struct LossAndGrad {
  double loss = 0.0;
  MlpGrad grad;
};

// inputs: in x batch.
LossAndGrad MlpGradient(const MlpParams& params,
                        const Eigen::MatrixXd& inputs, const BatchLoss& loss);

// params += scale * other, layer by layer.
void AddScaled(const MlpParams& other, double scale, MlpParams* params);

// Flat views used by gradient checking and serialization.
std::vector<double> Flatten(const MlpParams& params);
void Unflatten(std::span<const double> flat, MlpParams* params);

}  // namespace tdulab

#endif  // TDULAB_NN_MLP_H_
