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

#include "tdulab/bias/report.h"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <string>

#include "tdulab/metrics/csv.h"

namespace tdulab {
namespace {

std::optional<double> Ratio(double numerator, double denominator) {
  if (denominator == 0.0) return std::nullopt;
  return numerator / denominator;
}

// Open interval test that separates the exact boundary from the outside.
enum class Window { kInside, kBoundary, kOutside };

Window Classify(double x, double lo, double hi) {
  if (x > lo && x < hi) return Window::kInside;
  if (x == lo || x == hi) return Window::kBoundary;
  return Window::kOutside;
}

std::string Optional(const std::optional<double>& v) {
  return v ? FormatDouble(*v) : std::string();
}

std::string Flag(const std::optional<bool>& v) {
  if (!v) return std::string();
  return *v ? "1" : "0";
}

}  // namespace

double MomentReport::max_abs_mean_residual() const {
  double m = 0.0;
  for (const auto& p : pairs) m = std::max(m, std::abs(p.mean_residual()));
  return m;
}

double MomentReport::max_abs_variance_residual() const {
  double m = 0.0;
  for (const auto& p : pairs) m = std::max(m, std::abs(p.variance_residual()));
  return m;
}

bool MomentReport::all_finite() const {
  auto finite = [](double v) { return std::isfinite(v); };
  for (const auto& p : pairs) {
    for (double v : {p.mean_lhs, p.mean_rhs, p.variance_lhs, p.variance_rhs,
                     p.belief_mean, p.belief_variance, p.bias_mean,
                     p.bias_second, p.bias_variance}) {
      if (!finite(v)) return false;
    }
  }
  for (const auto& t : transitions) {
    for (double v : {t.mean_delta, t.variance_delta, t.bias_mean_delta,
                     t.bias_variance_delta, t.bias_mean_q, t.bias_variance_q,
                     t.bias_cross}) {
      if (!finite(v)) return false;
    }
    for (const auto& r : {t.rho, t.phi, t.kappa, t.alpha}) {
      if (r && !finite(*r)) return false;
    }
  }
  return true;
}

MomentReport BellmanResiduals(const ParamPosterior& posterior,
                              const MdpBelief& belief) {
  const PosteriorMomentTables post = PosteriorMoments(posterior, belief);
  const BeliefMomentTables bel = BeliefMoments(belief);
  const std::vector<DeltaMoments> bel_delta =
      BeliefDeltaMoments(belief, bel, post.transitions);
  const TabularMdp mix = belief.Mixture();

  MomentReport report;
  report.discount = mix.discount;
  report.feature_dim = posterior.feature_dim;
  for (int s = 0; s < mix.num_states; ++s) {
    for (int a = 0; a < mix.num_actions; ++a) {
      const int p = mix.pair(s, a);
      StateActionReport r;
      r.state = s;
      r.action = a;
      r.mean_lhs = post.mean[p];
      r.mean_rhs = post.backup_mean[p];
      r.variance_lhs = post.variance[p];
      r.variance_rhs = post.backup_variance[p];
      r.belief_mean = bel.mean[p];
      r.belief_variance = bel.variance[p];
      r.bias_mean = post.mean[p] - bel.mean[p];
      r.bias_second = post.second[p] - bel.second[p];
      r.bias_variance = post.variance[p] - bel.variance[p];
      report.pairs.push_back(r);
    }
  }

  // Unique mean predictions with a nonzero TD error of the mean predictor
  // under the mixture dynamics.
  const QTable mean_backup = BellmanBackup(mix, post.mean);
  double scale = 1.0;
  for (double v : post.mean) scale = std::max(scale, std::abs(v));
  const double tol = 1e-12 * scale;
  std::multiset<double> values(post.mean.begin(), post.mean.end());
  for (int p = 0; p < mix.num_pairs(); ++p) {
    const double v = post.mean[p];
    const auto lo = values.lower_bound(v - tol);
    const auto hi = values.upper_bound(v + tol);
    const bool unique = std::distance(lo, hi) == 1;
    const bool td_nonzero = std::abs(v - mean_backup[p]) > tol;
    if (unique && td_nonzero) ++report.unique_prediction_count;
  }

  for (std::size_t i = 0; i < post.transitions.size(); ++i) {
    const TransitionKey& k = post.transitions[i];
    const int here = mix.pair(k.state, k.action);
    const int next = mix.pair(k.next_state, k.next_action);
    TransitionReport t;
    t.key = k;
    t.mean_delta = post.deltas[i].mean;
    t.variance_delta = post.deltas[i].variance;
    t.bias_mean_delta = post.deltas[i].mean - bel_delta[i].mean;
    t.bias_variance_delta = post.deltas[i].variance - bel_delta[i].variance;
    const StateActionReport& h = report.pairs[here];
    const StateActionReport& n = report.pairs[next];
    t.bias_mean_q = h.bias_mean;
    t.bias_variance_q = h.bias_variance;
    t.bias_cross = post.deltas[i].cross - bel_delta[i].cross;
    t.rho = Ratio(n.bias_mean, h.bias_mean);
    t.phi = Ratio(n.bias_second, h.bias_second);
    t.kappa = Ratio(t.bias_cross, h.bias_second);
    t.alpha = Ratio(n.belief_mean, h.belief_mean);
    report.transitions.push_back(t);
  }
  return report;
}

double BiasSummary::mean_agreement() const {
  if (num_mean_condition == 0) return 1.0;
  return static_cast<double>(num_mean_condition_ordered) / num_mean_condition;
}

double BiasSummary::variance_agreement() const {
  if (num_variance_condition == 0) return 1.0;
  return static_cast<double>(num_variance_condition_ordered) /
         num_variance_condition;
}

BiasSummary BiasComparison(const MomentReport& report) {
  BiasSummary summary;
  const double gamma = report.discount;
  const double hi = 2.0 / gamma;
  for (const TransitionReport& t : report.transitions) {
    TransitionVerdict v;
    v.mean_ordering = std::abs(t.bias_mean_delta) < std::abs(t.bias_mean_q);
    v.variance_ordering =
        std::abs(t.bias_variance_delta) < std::abs(t.bias_variance_q);
    if (!t.rho) {
      ++summary.num_mean_undefined;
    } else {
      v.mean_condition = Classify(*t.rho, 0.0, hi) == Window::kInside;
      if (*v.mean_condition) {
        ++summary.num_mean_condition;
        if (v.mean_ordering) ++summary.num_mean_condition_ordered;
      }
    }
    if (t.rho && t.phi && t.kappa && t.alpha) {
      const Window windows[] = {
          Classify(*t.rho, 0.0, hi), Classify(*t.alpha, 0.0, hi),
          Classify(*t.kappa, 0.0, hi),
          Classify(*t.phi, 1.0 - 2.0 * gamma * *t.kappa, hi * hi)};
      bool inside = true;
      for (Window w : windows) {
        inside &= w == Window::kInside;
        v.variance_boundary |= w == Window::kBoundary;
      }
      if (v.variance_boundary) {
        ++summary.num_variance_boundary;
      } else {
        v.variance_condition = inside;
        if (inside) {
          ++summary.num_variance_condition;
          if (v.variance_ordering) ++summary.num_variance_condition_ordered;
        }
      }
    }
    summary.verdicts.push_back(v);
  }
  return summary;
}

void WritePairCsv(const MomentReport& report, std::ostream& out) {
  CsvWriter writer(out);
  writer.WriteRow({"state", "action", "mean_lhs", "mean_rhs", "mean_residual",
                   "variance_lhs", "variance_rhs", "variance_residual",
                   "belief_mean", "belief_variance", "bias_mean",
                   "bias_second", "bias_variance"});
  for (const StateActionReport& p : report.pairs) {
    writer.WriteRow({std::to_string(p.state), std::to_string(p.action),
                     FormatDouble(p.mean_lhs), FormatDouble(p.mean_rhs),
                     FormatDouble(p.mean_residual()),
                     FormatDouble(p.variance_lhs),
                     FormatDouble(p.variance_rhs),
                     FormatDouble(p.variance_residual()),
                     FormatDouble(p.belief_mean),
                     FormatDouble(p.belief_variance),
                     FormatDouble(p.bias_mean), FormatDouble(p.bias_second),
                     FormatDouble(p.bias_variance)});
  }
}

void WriteTransitionCsv(const MomentReport& report, std::ostream& out) {
  const BiasSummary summary = BiasComparison(report);
  CsvWriter writer(out);
  writer.WriteRow({"state", "action", "next_state", "next_action", "reward",
                   "mean_delta", "variance_delta", "bias_mean_delta",
                   "bias_variance_delta", "bias_mean_q", "bias_variance_q",
                   "bias_cross", "rho", "phi", "kappa", "alpha",
                   "mean_condition", "mean_ordering", "variance_condition",
                   "variance_ordering"});
  for (std::size_t i = 0; i < report.transitions.size(); ++i) {
    const TransitionReport& t = report.transitions[i];
    const TransitionVerdict& v = summary.verdicts[i];
    writer.WriteRow(
        {std::to_string(t.key.state), std::to_string(t.key.action),
         std::to_string(t.key.next_state), std::to_string(t.key.next_action),
         FormatDouble(t.key.reward), FormatDouble(t.mean_delta),
         FormatDouble(t.variance_delta), FormatDouble(t.bias_mean_delta),
         FormatDouble(t.bias_variance_delta), FormatDouble(t.bias_mean_q),
         FormatDouble(t.bias_variance_q), FormatDouble(t.bias_cross),
         Optional(t.rho), Optional(t.phi), Optional(t.kappa),
         Optional(t.alpha), Flag(v.mean_condition),
         v.mean_ordering ? "1" : "0", Flag(v.variance_condition),
         v.variance_ordering ? "1" : "0"});
  }
}

}  // namespace tdulab
