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

#include "tdulab/nn/rng.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tdulab {

uint64_t MixBits(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(uint64_t seed) : seed_(seed), key_(MixBits(seed)) {}

uint64_t RngStream::NextU64() {
  const uint64_t c = counter_++;
  return MixBits(key_ ^ MixBits(c * 0xd1342543de82ef95ULL + 1));
}

double RngStream::Uniform() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

double RngStream::Uniform(double lo, double hi) {
  return lo + (hi - lo) * Uniform();
}

uint64_t RngStream::UniformInt(uint64_t n) {
  if (n == 0) throw std::invalid_argument("UniformInt: n must be positive");
  // Rejection sampling removes modulo bias.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = NextU64();
  } while (x >= limit);
  return x % n;
}

double RngStream::Normal() {
  const double u1 = 1.0 - Uniform();  // (0, 1]
  const double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

bool RngStream::Bernoulli(double p) {
  if (p >= 1.0) {
    NextU64();
    return true;
  }
  return Uniform() < p;
}

RngStream RngStream::Split(std::string_view name) const {
  // FNV-1a over the name, folded into the key.
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char ch : name) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return RngStream(seed_, MixBits(key_ ^ MixBits(h)));
}

RngStream RngStream::Split(uint64_t index) const {
  return RngStream(seed_, MixBits(key_ + MixBits(index ^ 0x5851f42d4c957f2dULL)));
}

}  // namespace tdulab
