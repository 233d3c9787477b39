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

#include "tdulab/agents/checkpoint.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace tdulab {
namespace {

constexpr std::array<char, 8> kMagic = {'T', 'D', 'U', 'C', 'K', 'P', 'T', '\0'};

template <typename T>
void Put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T Get(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
    throw std::runtime_error("checkpoint: truncated input");
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

void PutNetwork(std::ostream& out, const MlpParams& params) {
  Put<uint32_t>(out, static_cast<uint32_t>(params.layers.size()));
  for (const auto& layer : params.layers) {
    Put<uint32_t>(out, static_cast<uint32_t>(layer.weight.rows()));
    Put<uint32_t>(out, static_cast<uint32_t>(layer.weight.cols()));
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) {
      Put<double>(out, layer.weight.data()[i]);
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
      Put<double>(out, layer.bias[i]);
    }
  }
}

MlpParams GetNetwork(std::istream& in) {
  MlpParams params;
  const uint32_t num_layers = Get<uint32_t>(in);
  if (num_layers > 1024) throw std::runtime_error("checkpoint: implausible layer count");
  for (uint32_t l = 0; l < num_layers; ++l) {
    const uint32_t rows = Get<uint32_t>(in);
    const uint32_t cols = Get<uint32_t>(in);
    if (static_cast<uint64_t>(rows) * cols > (uint64_t{1} << 32)) {
      throw std::runtime_error("checkpoint: implausible layer shape");
    }
    DenseLayer layer;
    layer.weight.resize(rows, cols);
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) {
      layer.weight.data()[i] = Get<double>(in);
    }
    layer.bias.resize(rows);
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
      layer.bias[i] = Get<double>(in);
    }
    params.layers.push_back(std::move(layer));
  }
  return params;
}

}  // namespace

void WriteCheckpoint(const EnsembleState& ensemble, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  Put<uint32_t>(out, kCheckpointVersion);
  Put<int32_t>(out, ensemble.num_exploiters);
  Put<int32_t>(out, ensemble.num_explorers);
  Put<int32_t>(out, ensemble.active_head);
  Put<uint32_t>(out, static_cast<uint32_t>(ensemble.heads.size()));
  for (const Head& head : ensemble.heads) {
    Put<int64_t>(out, head.step);
    Put<int64_t>(out, head.adam.step);
    Put<double>(out, head.adam.options.learning_rate);
    Put<double>(out, head.adam.options.beta1);
    Put<double>(out, head.adam.options.beta2);
    Put<double>(out, head.adam.options.epsilon);
    PutNetwork(out, head.online);
    PutNetwork(out, head.target);
    PutNetwork(out, head.prior);
    PutNetwork(out, head.prior_target);
    PutNetwork(out, head.adam.first_moment);
    PutNetwork(out, head.adam.second_moment);
  }
  if (!out) throw std::runtime_error("checkpoint: write failed");
}

EnsembleState ReadCheckpoint(std::istream& in) {
  std::array<char, 8> magic;
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw std::runtime_error("checkpoint: bad magic");
  }
  const uint32_t version = Get<uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw std::runtime_error("checkpoint: unsupported version " +
                             std::to_string(version));
  }
  EnsembleState ensemble;
  ensemble.num_exploiters = Get<int32_t>(in);
  ensemble.num_explorers = Get<int32_t>(in);
  ensemble.active_head = Get<int32_t>(in);
  const uint32_t num_heads = Get<uint32_t>(in);
  if (static_cast<int64_t>(num_heads) !=
      static_cast<int64_t>(ensemble.num_exploiters) + ensemble.num_explorers) {
    throw std::runtime_error("checkpoint: head count mismatch");
  }
  for (uint32_t h = 0; h < num_heads; ++h) {
    Head head;
    head.step = Get<int64_t>(in);
    head.adam.step = Get<int64_t>(in);
    head.adam.options.learning_rate = Get<double>(in);
    head.adam.options.beta1 = Get<double>(in);
    head.adam.options.beta2 = Get<double>(in);
    head.adam.options.epsilon = Get<double>(in);
    head.online = GetNetwork(in);
    head.target = GetNetwork(in);
    head.prior = GetNetwork(in);
    head.prior_target = GetNetwork(in);
    head.adam.first_moment = GetNetwork(in);
    head.adam.second_moment = GetNetwork(in);
    ensemble.heads.push_back(std::move(head));
  }
  return ensemble;
}

void SaveCheckpoint(const EnsembleState& ensemble, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path);
  WriteCheckpoint(ensemble, out);
}

EnsembleState LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  return ReadCheckpoint(in);
}

}  // namespace tdulab
