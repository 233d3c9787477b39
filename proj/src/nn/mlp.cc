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

#include "tdulab/nn/mlp.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tdulab {

int MlpParams::input_size() const {
  return layers.empty() ? 0 : static_cast<int>(layers.front().weight.cols());
}

int MlpParams::output_size() const {
  return layers.empty() ? 0 : static_cast<int>(layers.back().weight.rows());
}

std::size_t MlpParams::num_parameters() const {
  std::size_t n = 0;
  for (const auto& layer : layers) {
    n += layer.weight.size() + layer.bias.size();
  }
  return n;
}

std::vector<int> MlpParams::layer_sizes() const {
  std::vector<int> sizes;
  if (layers.empty()) return sizes;
  sizes.push_back(input_size());
  for (const auto& layer : layers) {
    sizes.push_back(static_cast<int>(layer.weight.rows()));
  }
  return sizes;
}

void MlpParams::Validate() const {
  if (layers.empty()) throw std::invalid_argument("MlpParams: no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& layer = layers[i];
    if (layer.bias.size() != layer.weight.rows()) {
      throw std::invalid_argument("MlpParams: bias size mismatch in layer " +
                                  std::to_string(i));
    }
    if (i > 0 && layer.weight.cols() != layers[i - 1].weight.rows()) {
      throw std::invalid_argument("MlpParams: layer " + std::to_string(i) +
                                  " does not chain with its predecessor");
    }
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) {
      throw std::invalid_argument("MlpParams: non-finite entry in layer " +
                                  std::to_string(i));
    }
  }
}

bool MlpParams::operator==(const MlpParams& other) const {
  if (layers.size() != other.layers.size()) return false;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& a = layers[i];
    const auto& b = other.layers[i];
    if (a.weight.rows() != b.weight.rows() ||
        a.weight.cols() != b.weight.cols() || a.bias.size() != b.bias.size()) {
      return false;
    }
    if (a.weight != b.weight || a.bias != b.bias) return false;
  }
  return true;
}

MlpParams MlpInit(std::span<const int> layer_sizes, RngStream& rng,
                  InitOptions options) {
  if (layer_sizes.size() < 2) {
    throw std::invalid_argument("MlpInit: need at least two layer sizes");
  }
  for (int size : layer_sizes) {
    if (size <= 0) {
      throw std::invalid_argument("MlpInit: layer sizes must be positive");
    }
  }
  if (options.scheme == InitScheme::kFixedScale &&
      !(options.scale >= 0.0 && std::isfinite(options.scale))) {
    throw std::invalid_argument("MlpInit: fixed scale must be finite and >= 0");
  }
  MlpParams params;
  for (std::size_t i = 0; i + 1 < layer_sizes.size(); ++i) {
    const int in = layer_sizes[i];
    const int out = layer_sizes[i + 1];
    const double bound = options.scheme == InitScheme::kHeUniform
                             ? std::sqrt(6.0 / in)
                             : options.scale;
    DenseLayer layer;
    layer.weight.resize(out, in);
    // Column-major fill order is part of the determinism contract.
    for (int c = 0; c < in; ++c) {
      for (int r = 0; r < out; ++r) {
        layer.weight(r, c) = rng.Uniform(-bound, bound);
      }
    }
    layer.bias = Eigen::VectorXd::Zero(out);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

MlpParams ZerosLike(const MlpParams& params) {
  MlpParams zeros;
  zeros.layers.reserve(params.layers.size());
  for (const auto& layer : params.layers) {
    zeros.layers.push_back(
        {Eigen::MatrixXd::Zero(layer.weight.rows(), layer.weight.cols()),
         Eigen::VectorXd::Zero(layer.bias.size())});
  }
  return zeros;
}

namespace {

void CheckInput(const MlpParams& params, std::size_t size) {
  if (params.layers.empty()) {
    throw std::invalid_argument("MlpForward: empty network");
  }
  if (static_cast<int>(size) != params.input_size()) {
    throw std::invalid_argument("MlpForward: input has length " +
                                std::to_string(size) + ", expected " +
                                std::to_string(params.input_size()));
  }
}

// z = W a + b, visiting input coordinates in ascending order and skipping
// exact zeros.
void AffineSparse(const DenseLayer& layer, const double* a, Eigen::Index n,
                  Eigen::VectorXd* z) {
  *z = layer.bias;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double aj = a[j];
    if (aj != 0.0) z->noalias() += aj * layer.weight.col(j);
  }
}

}  // namespace

void MlpForward(const MlpParams& params, std::span<const double> input,
                MlpTape* tape) {
  CheckInput(params, input.size());
  const std::size_t num_layers = params.layers.size();
  tape->activations.resize(num_layers + 1);
  tape->activations[0] = Eigen::Map<const Eigen::VectorXd>(
      input.data(), static_cast<Eigen::Index>(input.size()));
  for (std::size_t i = 0; i < num_layers; ++i) {
    const Eigen::VectorXd& a = tape->activations[i];
    Eigen::VectorXd& z = tape->activations[i + 1];
    AffineSparse(params.layers[i], a.data(), a.size(), &z);
    if (i + 1 < num_layers) z = z.cwiseMax(0.0);
  }
}

Eigen::VectorXd MlpForward(const MlpParams& params,
                           std::span<const double> input) {
  MlpTape tape;
  MlpForward(params, input, &tape);
  return std::move(tape.activations.back());
}

void MlpBackward(const MlpParams& params, const MlpTape& tape,
                 const Eigen::Ref<const Eigen::VectorXd>& output_grad,
                 MlpGrad* grad) {
  const std::size_t num_layers = params.layers.size();
  Eigen::VectorXd dz = output_grad;
  for (std::size_t i = num_layers; i-- > 0;) {
    const Eigen::VectorXd& a = tape.activations[i];
    DenseLayer& g = grad->layers[i];
    for (Eigen::Index j = 0; j < a.size(); ++j) {
      const double aj = a[j];
      if (aj != 0.0) g.weight.col(j).noalias() += aj * dz;
    }
    g.bias += dz;
    if (i == 0) break;
    Eigen::VectorXd da = params.layers[i].weight.transpose() * dz;
    // ReLU subgradient is 0 at exactly 0.
    for (Eigen::Index j = 0; j < da.size(); ++j) {
      if (!(a[j] > 0.0)) da[j] = 0.0;
    }
    dz = std::move(da);
  }
}

LossAndGrad MlpGradient(const MlpParams& params, const Eigen::MatrixXd& inputs,
                        const BatchLoss& loss) {
  const Eigen::Index batch = inputs.cols();
  std::vector<MlpTape> tapes(batch);
  Eigen::MatrixXd outputs(params.output_size(), batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    MlpForward(params,
               std::span<const double>(inputs.col(b).data(),
                                       static_cast<std::size_t>(inputs.rows())),
               &tapes[b]);
    outputs.col(b) = tapes[b].output();
  }
  Eigen::MatrixXd output_grads = Eigen::MatrixXd::Zero(outputs.rows(), batch);
  LossAndGrad result;
  result.loss = loss(outputs, &output_grads);
  result.grad = ZerosLike(params);
  for (Eigen::Index b = 0; b < batch; ++b) {
    if (output_grads.col(b).isZero(0.0)) continue;
    MlpBackward(params, tapes[b], output_grads.col(b), &result.grad);
  }
  return result;
}

void AddScaled(const MlpParams& other, double scale, MlpParams* params) {
  for (std::size_t i = 0; i < params->layers.size(); ++i) {
    params->layers[i].weight += scale * other.layers[i].weight;
    params->layers[i].bias += scale * other.layers[i].bias;
  }
}

std::vector<double> Flatten(const MlpParams& params) {
  std::vector<double> flat;
  flat.reserve(params.num_parameters());
  for (const auto& layer : params.layers) {
    flat.insert(flat.end(), layer.weight.data(),
                layer.weight.data() + layer.weight.size());
    flat.insert(flat.end(), layer.bias.data(),
                layer.bias.data() + layer.bias.size());
  }
  return flat;
}

void Unflatten(std::span<const double> flat, MlpParams* params) {
  if (flat.size() != params->num_parameters()) {
    throw std::invalid_argument("Unflatten: size mismatch");
  }
  std::size_t offset = 0;
  for (auto& layer : params->layers) {
    std::copy_n(flat.begin() + offset, layer.weight.size(), layer.weight.data());
    offset += layer.weight.size();
    std::copy_n(flat.begin() + offset, layer.bias.size(), layer.bias.data());
    offset += layer.bias.size();
  }
}

}  // namespace tdulab
