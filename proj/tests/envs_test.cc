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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "tdulab/envs/binary_tree.h"
#include "tdulab/envs/deep_sea.h"
#include "tdulab/nn/rng.h"

namespace tdulab {
namespace {

DeepSeaEnv MakeDeepSea(int size, bool stochastic, uint64_t seed = 1) {
  const RngStream root(seed);
  return DeepSeaEnv(size, stochastic, root.Split("env_map"),
                    root.Split("env_dynamics"));
}

int HotIndex(const std::vector<double>& obs) {
  int index = -1;
  int ones = 0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (obs[i] == 1.0) {
      index = static_cast<int>(i);
      ++ones;
    } else {
      REQUIRE(obs[i] == 0.0);
    }
  }
  REQUIRE(ones == 1);
  return index;
}

// Plays the policy that always intends to move right; returns the return.
double PlayAlwaysRight(DeepSeaEnv& env) {
  env.Reset();
  double total = 0.0;
  while (!env.episode_done()) {
    total += env.Step(env.RightAction(env.row(), env.column())).reward;
  }
  return total;
}

TEST_CASE("deep sea encodes position one-hot") {
  DeepSeaEnv env = MakeDeepSea(5, false);
  const std::vector<double> first = env.Reset();
  CHECK(first.size() == 25);
  CHECK(HotIndex(first) == 0);
  const StepResult step = env.Step(env.RightAction(0, 0));
  CHECK(HotIndex(step.observation) == 1 * 5 + 1);
  const StepResult left = env.Step(1 - env.RightAction(1, 1));
  CHECK(HotIndex(left.observation) == 2 * 5 + 0);
}

TEST_CASE("deep sea episodes last exactly N steps") {
  for (int n : {4, 7, 10}) {
    DeepSeaEnv env = MakeDeepSea(n, true, n);
    RngStream rng(n);
    for (int episode = 0; episode < 20; ++episode) {
      env.Reset();
      int steps = 0;
      StepResult last;
      while (!env.episode_done()) {
        last = env.Step(static_cast<int>(rng.UniformInt(2)));
        ++steps;
        if (!last.episode_done) CHECK(last.discount == 1.0);
      }
      CHECK(steps == n);
      CHECK(last.discount == 0.0);
      CHECK_THROWS_AS(env.Step(0), ContractViolation);
    }
  }
}

TEST_CASE("deep sea returns for the optimal and lazy policies") {
  DeepSeaEnv env = MakeDeepSea(10, false);
  CHECK(PlayAlwaysRight(env) == doctest::Approx(0.99).epsilon(1e-12));
  CHECK(env.OptimalReturn() == doctest::Approx(0.99).epsilon(1e-12));
  env.Reset();
  double lazy = 0.0;
  while (!env.episode_done()) {
    lazy += env.Step(1 - env.RightAction(env.row(), env.column())).reward;
  }
  CHECK(lazy == 0.0);
  CHECK(env.move_cost() == doctest::Approx(0.001));
}

TEST_CASE("deep sea has a unique rewarding action sequence") {
  constexpr int kSize = 6;
  DeepSeaEnv env = MakeDeepSea(kSize, false, 3);
  int rewarded = 0;
  for (int code = 0; code < (1 << kSize); ++code) {
    env.Reset();
    double total = 0.0;
    for (int t = 0; t < kSize; ++t) total += env.Step((code >> t) & 1).reward;
    if (total > 0.5) {
      ++rewarded;
      CHECK(total == doctest::Approx(0.99));
    }
  }
  CHECK(rewarded == 1);
}

TEST_CASE("deep sea action maps depend on the seed only") {
  DeepSeaEnv a = MakeDeepSea(8, false, 4), b = MakeDeepSea(8, false, 4);
  DeepSeaEnv c = MakeDeepSea(8, false, 5);
  int differences = 0;
  for (int r = 0; r < 8; ++r) {
    for (int col = 0; col < 8; ++col) {
      CHECK(a.RightAction(r, col) == b.RightAction(r, col));
      differences += a.RightAction(r, col) != c.RightAction(r, col);
    }
  }
  CHECK(differences > 0);
}

TEST_CASE("stochastic deep sea success rate under the right-moving policy") {
  DeepSeaEnv env = MakeDeepSea(10, true, 8);
  constexpr int kEpisodes = 40000;
  int successes = 0;
  for (int e = 0; e < kEpisodes; ++e) successes += PlayAlwaysRight(env) > 0.5;
  const double p = std::pow(0.9, 10);
  CHECK(p == doctest::Approx(0.3487).epsilon(1e-4));
  const double se = std::sqrt(p * (1 - p) / kEpisodes);
  CHECK(std::abs(static_cast<double>(successes) / kEpisodes - p) < 5 * se);
}

TEST_CASE("stochastic deep sea optimal value: dynamic program vs Monte Carlo") {
  for (int n : {4, 6}) {
    DeepSeaEnv env = MakeDeepSea(n, true, 10 + n);
    const double dp = DeepSeaOptimalReturn(n, true);
    CHECK(env.OptimalReturn() == dp);
    // The greedy right-mover is optimal here; compare its mean return.
    constexpr int kEpisodes = 60000;
    double total = 0.0, total_sq = 0.0;
    for (int e = 0; e < kEpisodes; ++e) {
      const double r = PlayAlwaysRight(env);
      total += r;
      total_sq += r * r;
    }
    const double mean = total / kEpisodes;
    const double var = total_sq / kEpisodes - mean * mean;
    CHECK(std::abs(mean - dp) < 5 * std::sqrt(var / kEpisodes) + 1e-12);
    CHECK(dp < DeepSeaOptimalReturn(n, false));
  }
}

TEST_CASE("deep sea rejects bad sizes and actions") {
  CHECK_THROWS_AS(MakeDeepSea(3, false), std::invalid_argument);
  DeepSeaEnv env = MakeDeepSea(4, false);
  CHECK_THROWS_AS(env.Step(2), std::invalid_argument);
  CHECK_THROWS_AS(env.Step(-1), std::invalid_argument);
}

TEST_CASE("binary tree: rewarding path and early termination") {
  BinaryTreeEnv env(5, RngStream(2));
  CHECK(env.observation_size() == 5);
  CHECK(HotIndex(env.Reset()) == 0);
  double total = 0.0;
  int steps = 0;
  while (!env.episode_done()) {
    const StepResult s = env.Step(env.AdvanceAction(env.branch()));
    total += s.reward;
    ++steps;
  }
  CHECK(steps == 5);
  CHECK(total == 1.0);
  CHECK_THROWS_AS(env.Step(0), ContractViolation);

  env.Reset();
  env.Step(env.AdvanceAction(0));
  const StepResult wrong = env.Step(1 - env.AdvanceAction(1));
  CHECK(wrong.episode_done);
  CHECK(wrong.reward == 0.0);
  CHECK(wrong.discount == 0.0);
}

TEST_CASE("binary tree random policy succeeds with probability 2^-L") {
  BinaryTreeEnv env(10, RngStream(4));
  RngStream rng(5);
  constexpr int kEpisodes = 400000;
  int successes = 0;
  for (int e = 0; e < kEpisodes; ++e) {
    env.Reset();
    double total = 0.0;
    while (!env.episode_done()) {
      total += env.Step(static_cast<int>(rng.UniformInt(2))).reward;
    }
    successes += total > 0.5;
  }
  const double p = std::ldexp(1.0, -10);
  const double se = std::sqrt(p * (1 - p) / kEpisodes);
  CHECK(std::abs(static_cast<double>(successes) / kEpisodes - p) < 5 * se);
}

TEST_CASE("binary tree depth one and invalid depth") {
  BinaryTreeEnv env(1, RngStream(0));
  const StepResult s = env.Step(env.AdvanceAction(0));
  CHECK(s.reward == 1.0);
  CHECK(s.episode_done);
  CHECK_THROWS_AS(BinaryTreeEnv(0, RngStream(0)), std::invalid_argument);
}

}  // namespace
}  // namespace tdulab
