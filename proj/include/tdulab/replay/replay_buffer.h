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

#ifndef TDULAB_REPLAY_REPLAY_BUFFER_H_
#define TDULAB_REPLAY_REPLAY_BUFFER_H_

#include <cstdint>
#include <vector>

#include "tdulab/nn/rng.h"

namespace tdulab {

// One environment step shared by every ensemble head. The bootstrap mask and
// reward noise are drawn once at insertion and never change.
struct Transition {
  std::vector<double> observation;
  int action = 0;
  double reward = 0.0;
  double discount = 1.0;  // 0 at episode end; gamma is applied by the loss.
  std::vector<double> next_observation;
  std::vector<uint8_t> mask;   // one entry per head, each 0 or 1
  std::vector<double> noise;   // one standard-normal draw per head
  double count_bonus = 0.0;    // count-based bonus, used by the CTS variant
};

using Batch = std::vector<Transition>;

// FIFO ring buffer with uniform sampling with replacement.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::size_t ensemble_size);

  // Throws std::invalid_argument on a malformed transition.
  void Add(Transition transition);

  // Throws ContractViolation when empty.
  Batch Sample(std::size_t batch_size, RngStream& rng) const;
  std::vector<std::size_t> SampleIndices(std::size_t batch_size,
                                         RngStream& rng) const;

  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::size_t ensemble_size() const { return ensemble_size_; }
  uint64_t num_added() const { return num_added_; }
  bool empty() const { return storage_.empty(); }

  // i-th oldest stored transition.
  const Transition& at(std::size_t i) const;
  // Transition in storage slot `slot` (the order SampleIndices refers to).
  const Transition& slot(std::size_t slot) const { return storage_[slot]; }

 private:
  std::size_t capacity_;
  std::size_t ensemble_size_;
  std::vector<Transition> storage_;
  std::size_t next_slot_ = 0;
  uint64_t num_added_ = 0;
};

}  // namespace tdulab

#endif  // TDULAB_REPLAY_REPLAY_BUFFER_H_
