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

#ifndef TDULAB_CLI_BIAS_SUITE_H_
#define TDULAB_CLI_BIAS_SUITE_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace tdulab {

struct BiasSuiteOptions {
  uint64_t seed = 1;
  double discount = 0.9;
  int random_instances = 100;
  // Replaces the consistency belief's probabilities when non-empty (three
  // values).
  std::vector<double> belief_probabilities;
};

struct BiasSuiteResult {
  // Push-forward posterior: largest |lhs - rhs| over both moment equations.
  double consistency_residual = 0.0;
  // Final-layer posterior with feature_dim << number of pairs.
  double final_layer_residual = 0.0;
  int final_layer_unique = 0;
  int final_layer_feature_dim = 0;
  // max | |Bias V[delta]| - (gamma-1)^2 |Bias V[Q]| | on the symmetric cycle.
  double eq7_deviation = 0.0;
  double eq7_max_ratio_error = 0.0;  // max |ratio - 1| over rho, phi, kappa, alpha
  // max |Bias E[delta]| along a chain with rho = 1/gamma.
  double unbiased_chain_bias = 0.0;
  // Along a chain with rho = 3/gamma: transitions meeting the mean condition
  // (expected 0) and those whose ordering nonetheless holds.
  int out_of_window_condition = 0;
  int out_of_window_ordered = 0;
  // Random instances are drawn until `random_instances` of them have at
  // least one transition with rho in the window.
  int random_instances = 0;
  int random_attempts = 0;
  int random_with_condition = 0;
  int random_transitions_in_window = 0;
  int random_violations = 0;       // in-window transitions where ordering fails
  int random_variance_condition = 0;
  int random_variance_ordered = 0;

  bool consistency_ok() const { return consistency_residual <= 1e-10; }
  bool final_layer_ok() const {
    return final_layer_residual > 1e-6 &&
           final_layer_unique > final_layer_feature_dim + 1;
  }
  bool eq7_ok() const {
    return eq7_deviation <= 1e-10 && eq7_max_ratio_error <= 1e-10;
  }
  bool unbiased_chain_ok() const { return unbiased_chain_bias <= 1e-10; }
  bool random_ok() const {
    return random_violations == 0 &&
           random_with_condition == random_instances;
  }
  bool all_ok() const {
    return consistency_ok() && final_layer_ok() && eq7_ok() &&
           unbiased_chain_ok() && random_ok() && out_of_window_condition == 0;
  }
};

// Builds every construction and measures it. Throws std::invalid_argument on
// invalid options (for example probabilities that do not sum to 1).
BiasSuiteResult ComputeBiasSuite(const BiasSuiteOptions& options);

// Also writes the per-pair and per-transition CSVs of each construction and
// a summary under `dir`. Returns 0 when every expected outcome holds and 1
// otherwise.
int RunBiasSuite(const BiasSuiteOptions& options, const std::string& dir,
                 std::ostream& log);

void WriteBiasSummary(const BiasSuiteResult& result, std::ostream& out);

}  // namespace tdulab

#endif  // TDULAB_CLI_BIAS_SUITE_H_
