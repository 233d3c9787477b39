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

#ifndef TDULAB_BIAS_REPORT_H_
#define TDULAB_BIAS_REPORT_H_

#include <iosfwd>
#include <optional>
#include <vector>

#include "tdulab/bias/moments.h"

namespace tdulab {

struct StateActionReport {
  int state = 0;
  int action = 0;
  // Mean and variance propagation: lhs is the posterior moment of Q, rhs the
  // posterior moment of its one-step Bellman backup.
  double mean_lhs = 0.0;
  double mean_rhs = 0.0;
  double variance_lhs = 0.0;
  double variance_rhs = 0.0;
  double belief_mean = 0.0;
  double belief_variance = 0.0;
  double bias_mean = 0.0;      // B = E_theta[Q] - E_M[Q]
  double bias_second = 0.0;    // C = E_theta[Q^2] - E_M[Q^2]
  double bias_variance = 0.0;  // V_theta[Q] - V_M[Q]

  double mean_residual() const { return mean_lhs - mean_rhs; }
  double variance_residual() const { return variance_lhs - variance_rhs; }
};

struct TransitionReport {
  TransitionKey key;
  double mean_delta = 0.0;
  double variance_delta = 0.0;
  double bias_mean_delta = 0.0;      // gamma B(s', a') - B(s, a)
  double bias_variance_delta = 0.0;  // V_theta[delta] - V_M[delta^M]
  double bias_mean_q = 0.0;          // B(s, a)
  double bias_variance_q = 0.0;      // bias of V_theta[Q(s, a)]
  double bias_cross = 0.0;           // D(s, a, s')
  // Undefined when the denominator is exactly zero.
  std::optional<double> rho;
  std::optional<double> phi;
  std::optional<double> kappa;
  std::optional<double> alpha;
};

struct MomentReport {
  double discount = 0.0;
  int feature_dim = 0;
  // Pairs with a unique mean prediction and a nonzero mean TD error.
  int unique_prediction_count = 0;
  std::vector<StateActionReport> pairs;
  std::vector<TransitionReport> transitions;

  double max_abs_mean_residual() const;
  double max_abs_variance_residual() const;
  bool all_finite() const;
};

// Validates both inputs, then computes every moment exactly.
MomentReport BellmanResiduals(const ParamPosterior& posterior,
                              const MdpBelief& belief);

struct TransitionVerdict {
  // rho in (0, 2/gamma); unset when rho is undefined.
  std::optional<bool> mean_condition;
  bool mean_ordering = false;  // |Bias E[delta|tau]| < |Bias E[Q(s, a)]|
  // rho, alpha, kappa in (0, 2/gamma) and phi in (1 - 2 gamma kappa,
  // (2/gamma)^2), all open; unset when a ratio is undefined or on a boundary.
  std::optional<bool> variance_condition;
  bool variance_boundary = false;
  bool variance_ordering = false;  // |Bias V[delta|tau]| < |Bias V[Q(s, a)]|
};

struct BiasSummary {
  std::vector<TransitionVerdict> verdicts;
  int num_mean_condition = 0;
  int num_mean_condition_ordered = 0;
  int num_mean_undefined = 0;
  int num_variance_condition = 0;
  int num_variance_condition_ordered = 0;
  int num_variance_boundary = 0;

  // Fraction of transitions meeting the condition whose ordering holds; 1
  // when no transition meets it.
  double mean_agreement() const;
  double variance_agreement() const;
};

BiasSummary BiasComparison(const MomentReport& report);

// CSV emission, columns in this order:
//   pairs: state, action, mean_lhs, mean_rhs, mean_residual, variance_lhs,
//          variance_rhs, variance_residual, belief_mean, belief_variance,
//          bias_mean, bias_second, bias_variance
//   transitions: state, action, next_state, next_action, reward, mean_delta,
//          variance_delta, bias_mean_delta, bias_variance_delta, bias_mean_q,
//          bias_variance_q, bias_cross, rho, phi, kappa, alpha,
//          mean_condition, mean_ordering, variance_condition,
//          variance_ordering
// Undefined ratios and unset conditions are written as empty fields.
void WritePairCsv(const MomentReport& report, std::ostream& out);
void WriteTransitionCsv(const MomentReport& report, std::ostream& out);

}  // namespace tdulab

#endif  // TDULAB_BIAS_REPORT_H_
