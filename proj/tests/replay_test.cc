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

#include <vector>

#include "doctest.h"
#include "tdulab/envs/environment.h"
#include "tdulab/nn/rng.h"
#include "tdulab/replay/replay_buffer.h"

namespace tdulab {
namespace {

Transition MakeTransition(double reward, std::size_t heads, RngStream& rng) {
  Transition t;
  t.observation = {reward, 0.0};
  t.next_observation = {0.0, reward};
  t.reward = reward;
  t.mask.resize(heads);
  t.noise.resize(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    t.mask[h] = rng.Bernoulli(0.5) ? 1 : 0;
    t.noise[h] = rng.Normal();
  }
  return t;
}

TEST_CASE("replay evicts in FIFO order") {
  RngStream rng(1);
  ReplayBuffer buffer(3, 2);
  CHECK(buffer.empty());
  for (int i = 0; i < 5; ++i) buffer.Add(MakeTransition(i, 2, rng));
  CHECK(buffer.size() == 3);
  CHECK(buffer.num_added() == 5);
  CHECK(buffer.at(0).reward == 2.0);
  CHECK(buffer.at(1).reward == 3.0);
  CHECK(buffer.at(2).reward == 4.0);
  CHECK_THROWS_AS(buffer.at(3), std::out_of_range);
}

TEST_CASE("replay sampling is uniform over stored transitions") {
  RngStream rng(2);
  constexpr int kSize = 20;
  ReplayBuffer buffer(kSize, 1);
  for (int i = 0; i < 45; ++i) buffer.Add(MakeTransition(i, 1, rng));
  std::vector<int> counts(kSize, 0);
  constexpr int kDraws = 200000;
  RngStream sampler(3);
  const Batch batch = buffer.Sample(kDraws, sampler);
  for (const Transition& t : batch) {
    const int id = static_cast<int>(t.reward) - 25;
    REQUIRE(id >= 0);
    REQUIRE(id < kSize);
    ++counts[id];
  }
  const double expected = static_cast<double>(kDraws) / kSize;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 36.19);  // 1% critical value, 19 degrees of freedom
}

TEST_CASE("masks and noise are stored unchanged") {
  RngStream rng(4);
  ReplayBuffer buffer(100, 6);
  std::vector<Transition> added;
  for (int i = 0; i < 50; ++i) {
    added.push_back(MakeTransition(i, 6, rng));
    buffer.Add(added.back());
  }
  RngStream sampler(5);
  for (int round = 0; round < 10; ++round) buffer.Sample(32, sampler);
  for (int i = 0; i < 50; ++i) {
    CHECK(buffer.at(i).mask == added[i].mask);
    CHECK(buffer.at(i).noise == added[i].noise);
  }
}

TEST_CASE("sampling is reproducible from the stream") {
  RngStream rng(6);
  ReplayBuffer buffer(10, 1);
  for (int i = 0; i < 10; ++i) buffer.Add(MakeTransition(i, 1, rng));
  RngStream a(7), b(7);
  CHECK(buffer.SampleIndices(64, a) == buffer.SampleIndices(64, b));
}

TEST_CASE("replay contract errors") {
  RngStream rng(8);
  ReplayBuffer buffer(4, 2);
  CHECK_THROWS_AS(buffer.Sample(1, rng), ContractViolation);
  CHECK_THROWS_AS(ReplayBuffer(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(buffer.Add(MakeTransition(0, 3, rng)), std::invalid_argument);
  Transition bad = MakeTransition(0, 2, rng);
  bad.mask[0] = 2;
  CHECK_THROWS_AS(buffer.Add(bad), std::invalid_argument);
}

}  // namespace
}  // namespace tdulab
