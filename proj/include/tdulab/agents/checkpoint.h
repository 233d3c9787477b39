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

// Binary checkpoint of an EnsembleState. All integers and doubles are written
// little-endian; doubles as raw IEEE-754 bits, so a round trip is bit-exact.
//
//   magic            8 bytes  "TDUCKPT\0"
//   version          u32      1
//   num_exploiters   i32
//   num_explorers    i32
//   active_head      i32
//   num_heads        u32
//   per head:
//     step           i64
//     adam_step      i64
//     lr, beta1, beta2, epsilon   f64 x 4
//     online, target, prior, prior_target, adam_m, adam_v   network x 6
//   network:
//     num_layers     u32
//     per layer: rows u32, cols u32, weight f64[rows*cols] (column-major),
//                bias f64[rows]

#ifndef TDULAB_AGENTS_CHECKPOINT_H_
#define TDULAB_AGENTS_CHECKPOINT_H_

#include <cstdint>
#include <iosfwd>
#include <string>

#include "tdulab/agents/ensemble.h"

namespace tdulab {

inline constexpr uint32_t kCheckpointVersion = 1;

void WriteCheckpoint(const EnsembleState& ensemble, std::ostream& out);
// Throws std::runtime_error on a bad magic, unknown version or truncation.
EnsembleState ReadCheckpoint(std::istream& in);

void SaveCheckpoint(const EnsembleState& ensemble, const std::string& path);
EnsembleState LoadCheckpoint(const std::string& path);

}  // namespace tdulab

#endif  // TDULAB_AGENTS_CHECKPOINT_H_
