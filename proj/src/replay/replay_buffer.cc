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

#include "tdulab/replay/replay_buffer.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "tdulab/envs/environment.h"

namespace tdulab {

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t ensemble_size)
    : capacity_(capacity), ensemble_size_(ensemble_size) {
  if (capacity == 0) {
    throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  }
  storage_.reserve(capacity);
}

void ReplayBuffer::Add(Transition transition) {
  if (transition.mask.size() != ensemble_size_) {
    throw std::invalid_argument(
        "ReplayBuffer::Add: mask has length " +
        std::to_string(transition.mask.size()) + ", expected " +
        std::to_string(ensemble_size_));
  }
  if (transition.noise.size() != ensemble_size_) {
    throw std::invalid_argument("ReplayBuffer::Add: noise length mismatch");
  }
  for (uint8_t m : transition.mask) {
    if (m > 1) throw std::invalid_argument("ReplayBuffer::Add: mask not binary");
  }
  if (transition.observation.size() != transition.next_observation.size()) {
    throw std::invalid_argument(
        "ReplayBuffer::Add: observation sizes differ");
  }
  if (!storage_.empty() &&
      transition.observation.size() != storage_.front().observation.size()) {
    throw std::invalid_argument(
        "ReplayBuffer::Add: observation size differs from stored data");
  }
  if (!std::isfinite(transition.reward)) {
    throw std::invalid_argument("ReplayBuffer::Add: non-finite reward");
  }
  if (storage_.size() < capacity_) {
    storage_.push_back(std::move(transition));
  } else {
    storage_[next_slot_] = std::move(transition);
  }
  next_slot_ = (next_slot_ + 1) % capacity_;
  ++num_added_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= storage_.size()) throw std::out_of_range("ReplayBuffer::at");
  const std::size_t oldest = storage_.size() < capacity_ ? 0 : next_slot_;
  return storage_[(oldest + i) % storage_.size()];
}

std::vector<std::size_t> ReplayBuffer::SampleIndices(std::size_t batch_size,
                                                     RngStream& rng) const {
  if (storage_.empty()) {
    throw ContractViolation("ReplayBuffer::Sample on an empty buffer");
  }
  std::vector<std::size_t> indices(batch_size);
  for (auto& index : indices) index = rng.UniformInt(storage_.size());
  return indices;
}

Batch ReplayBuffer::Sample(std::size_t batch_size, RngStream& rng) const {
  Batch batch;
  batch.reserve(batch_size);
  for (std::size_t index : SampleIndices(batch_size, rng)) {
    batch.push_back(storage_[index]);
  }
  return batch;
}

}  // namespace tdulab
