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

#ifndef TDULAB_NN_RNG_H_
#define TDULAB_NN_RNG_H_

#include <cstdint>
#include <string_view>

namespace tdulab {

// Counter-based pseudo-random stream. Every draw is a pure function of
// (key, counter), so identical seeds and identical call sequences produce
// bit-identical outputs on every platform. Streams are cheap to copy and to
// split; a stream must not be shared between threads.
class RngStream {
 public:
  explicit RngStream(uint64_t seed = 0);

  uint64_t seed() const { return seed_; }
  uint64_t counter() const { return counter_; }

  uint64_t NextU64();
  // Uniform on [0, 1) with 53 random bits.
  double Uniform();
  double Uniform(double lo, double hi);
  // Uniform on {0, ..., n - 1}; n must be positive.
  uint64_t UniformInt(uint64_t n);
  // Standard normal via Box-Muller; consumes exactly two uniforms.
  double Normal();
  bool Bernoulli(double p);

  // Independent child streams. Splitting does not advance this stream.
  RngStream Split(std::string_view name) const;
  RngStream Split(uint64_t index) const;

 private:
  RngStream(uint64_t seed, uint64_t key) : seed_(seed), key_(key) {}

  uint64_t seed_;
  uint64_t key_;
  uint64_t counter_ = 0;
};

// SplitMix64 finalizer.
uint64_t MixBits(uint64_t x);

}  // namespace tdulab

#endif  // TDULAB_NN_RNG_H_
