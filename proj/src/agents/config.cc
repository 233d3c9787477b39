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

#include "tdulab/agents/config.h"

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace tdulab {
namespace {

constexpr std::array<std::pair<Variant, std::string_view>, 7> kVariantNames = {{
    {Variant::kTdu, "tdu"},
    {Variant::kBdqn, "bdqn"},
    {Variant::kQu, "qu"},
    {Variant::kQUcb, "q_ucb"},
    {Variant::kQex, "qex"},
    {Variant::kCts, "cts"},
    {Variant::kTduBandit, "tdu_bandit"},
}};

void Require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument("TduConfig: " + message);
}

}  // namespace

std::string VariantName(Variant variant) {
  for (const auto& [v, name] : kVariantNames) {
    if (v == variant) return std::string(name);
  }
  return "unknown";
}

std::optional<Variant> ParseVariant(std::string_view name) {
  for (const auto& [v, n] : kVariantNames) {
    if (n == name) return v;
  }
  return std::nullopt;
}

void TduConfig::Validate() const {
  Require(num_exploiters >= 1, "num_exploiters must be >= 1");
  Require(num_explorers >= 0, "num_explorers must be >= 0");
  const bool needs_spread = variant == Variant::kTdu ||
                            variant == Variant::kTduBandit ||
                            variant == Variant::kQu;
  if (needs_spread && num_explorers > 0) {
    Require(num_exploiters >= 2,
            "num_exploiters must be >= 2 to estimate a standard deviation");
  }
  if (variant == Variant::kQUcb) {
    Require(ensemble_size() >= 2, "q_ucb needs at least two heads");
  }
  Require(std::isfinite(beta) && beta >= 0.0, "beta must be finite and >= 0");
  Require(std::isfinite(prior_scale) && prior_scale >= 0.0,
          "prior_scale must be finite and >= 0");
  Require(discount > 0.0 && discount <= 1.0, "discount must be in (0, 1]");
  Require(mask_probability >= 0.0 && mask_probability <= 1.0,
          "mask_probability must be in [0, 1]");
  Require(std::isfinite(noise_scale) && noise_scale >= 0.0,
          "noise_scale must be finite and >= 0");
  Require(batch_size >= 1, "batch_size must be >= 1");
  Require(learning_rate > 0.0 && std::isfinite(learning_rate),
          "learning_rate must be positive");
  Require(sgd_period >= 1, "sgd_period must be >= 1");
  Require(target_update_period >= 1, "target_update_period must be >= 1");
  Require(min_replay_size >= 1, "min_replay_size must be >= 1");
  Require(replay_capacity >= 1, "replay_capacity must be >= 1");
  Require(!hidden_sizes.empty(), "hidden_sizes must not be empty");
  for (int h : hidden_sizes) Require(h >= 1, "hidden sizes must be >= 1");
  Require(epsilon >= 0.0 && epsilon <= 1.0, "epsilon must be in [0, 1]");
  Require(std::isfinite(bandit_eta) && bandit_eta >= 0.0,
          "bandit_eta must be finite and >= 0");
}

}  // namespace tdulab
