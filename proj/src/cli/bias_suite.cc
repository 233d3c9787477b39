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

#include "tdulab/cli/bias_suite.h"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "tdulab/bias/constructions.h"
#include "tdulab/bias/report.h"
#include "tdulab/metrics/csv.h"

namespace tdulab {
namespace {

constexpr int kAttemptsPerInstance = 20;

const TransitionReport* Find(const MomentReport& report,
                             const TransitionKey& key) {
  for (const TransitionReport& t : report.transitions) {
    if (t.key.state == key.state && t.key.action == key.action &&
        t.key.next_state == key.next_state) {
      return &t;
    }
  }
  return nullptr;
}

const TransitionReport& FindOrThrow(const MomentReport& report,
                                    const TransitionKey& key) {
  const TransitionReport* t = Find(report, key);
  if (t == nullptr) throw std::logic_error("designed transition not present");
  return *t;
}

double RatioError(const std::optional<double>& r) {
  return r ? std::abs(*r - 1.0) : INFINITY;
}

struct Suite {
  BiasSuiteResult result;
  std::vector<std::pair<std::string, MomentReport>> reports;
};

Suite Compute(const BiasSuiteOptions& options) {
  if (!(options.discount > 0.0 && options.discount < 1.0)) {
    throw std::invalid_argument("bias suite: discount must lie in (0, 1)");
  }
  if (options.random_instances < 1) {
    throw std::invalid_argument("bias suite: need at least one random instance");
  }
  const RngStream root(options.seed);
  const double gamma = options.discount;
  Suite suite;
  BiasSuiteResult& out = suite.result;

  {
    RngStream rng = root.Split("consistency");
    BiasInstance inst = ConsistencyInstance(4, 2, 3, gamma, rng);
    if (!options.belief_probabilities.empty()) {
      if (options.belief_probabilities.size() != inst.belief.size()) {
        throw std::invalid_argument(
            "bias suite: belief probabilities need exactly 3 values");
      }
      inst.belief.probabilities = options.belief_probabilities;
      inst.posterior.probabilities = options.belief_probabilities;
    }
    MomentReport report = BellmanResiduals(inst.posterior, inst.belief);
    out.consistency_residual = std::max(report.max_abs_mean_residual(),
                                        report.max_abs_variance_residual());
    suite.reports.emplace_back("consistency", std::move(report));
  }
  {
    RngStream rng = root.Split("final_layer");
    const BiasInstance inst = FinalLayerInstance(8, 2, 2, 6, gamma, rng);
    MomentReport report = BellmanResiduals(inst.posterior, inst.belief);
    out.final_layer_residual = report.max_abs_mean_residual();
    out.final_layer_unique = report.unique_prediction_count;
    out.final_layer_feature_dim = report.feature_dim;
    suite.reports.emplace_back("final_layer", std::move(report));
  }
  {
    RngStream rng = root.Split("symmetric_cycle");
    const BiasInstance inst = SymmetricCycleInstance(gamma, rng);
    MomentReport report = BellmanResiduals(inst.posterior, inst.belief);
    for (const TransitionKey& key : inst.designed) {
      const TransitionReport& t = FindOrThrow(report, key);
      const double lhs = std::abs(t.bias_variance_delta);
      const double rhs =
          (gamma - 1.0) * (gamma - 1.0) * std::abs(t.bias_variance_q);
      out.eq7_deviation = std::max(out.eq7_deviation, std::abs(lhs - rhs));
      for (const auto& r : {t.rho, t.phi, t.kappa, t.alpha}) {
        out.eq7_max_ratio_error = std::max(out.eq7_max_ratio_error,
                                           RatioError(r));
      }
    }
    suite.reports.emplace_back("symmetric_cycle", std::move(report));
  }
  {
    RngStream rng = root.Split("unbiased_chain");
    const BiasInstance inst =
        ScaledBiasChainInstance(6, 1.0 / gamma, gamma, rng);
    MomentReport report = BellmanResiduals(inst.posterior, inst.belief);
    for (const TransitionKey& key : inst.designed) {
      out.unbiased_chain_bias =
          std::max(out.unbiased_chain_bias,
                   std::abs(FindOrThrow(report, key).bias_mean_delta));
    }
    suite.reports.emplace_back("unbiased_chain", std::move(report));
  }
  {
    RngStream rng = root.Split("out_of_window_chain");
    const BiasInstance inst =
        ScaledBiasChainInstance(6, 3.0 / gamma, gamma, rng);
    MomentReport report = BellmanResiduals(inst.posterior, inst.belief);
    const BiasSummary summary = BiasComparison(report);
    for (const TransitionKey& key : inst.designed) {
      const TransitionReport& t = FindOrThrow(report, key);
      const std::size_t i = &t - report.transitions.data();
      const TransitionVerdict& v = summary.verdicts[i];
      if (v.mean_condition.value_or(false)) ++out.out_of_window_condition;
      if (v.mean_ordering) ++out.out_of_window_ordered;
    }
    suite.reports.emplace_back("out_of_window_chain", std::move(report));
  }
  {
    const RngStream rng_root = root.Split("random");
    out.random_instances = options.random_instances;
    while (out.random_with_condition < options.random_instances &&
           out.random_attempts <
               kAttemptsPerInstance * options.random_instances) {
      RngStream rng = rng_root.Split(static_cast<uint64_t>(out.random_attempts));
      ++out.random_attempts;
      const BiasInstance inst = RandomBiasInstance(5, 2, gamma, rng);
      MomentReport report = BellmanResiduals(inst.posterior, inst.belief);
      const BiasSummary summary = BiasComparison(report);
      if (summary.num_mean_condition == 0) continue;
      ++out.random_with_condition;
      out.random_transitions_in_window += summary.num_mean_condition;
      out.random_violations +=
          summary.num_mean_condition - summary.num_mean_condition_ordered;
      out.random_variance_condition += summary.num_variance_condition;
      out.random_variance_ordered += summary.num_variance_condition_ordered;
      if (out.random_with_condition == 1) {
        suite.reports.emplace_back("random_first", std::move(report));
      }
    }
  }
  return suite;
}

const char* Verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

}  // namespace

BiasSuiteResult ComputeBiasSuite(const BiasSuiteOptions& options) {
  return Compute(options).result;
}

void WriteBiasSummary(const BiasSuiteResult& r, std::ostream& out) {
  out << Verdict(r.consistency_ok())
      << " consistency: max moment residual " << r.consistency_residual
      << " (<= 1e-10)\n";
  out << Verdict(r.final_layer_ok())
      << " final-layer posterior: mean residual " << r.final_layer_residual
      << ", unique predictions " << r.final_layer_unique << " > n+1 = "
      << r.final_layer_feature_dim + 1 << "\n";
  out << Verdict(r.eq7_ok()) << " symmetric cycle: identity deviation "
      << r.eq7_deviation << ", max |ratio - 1| " << r.eq7_max_ratio_error
      << "\n";
  out << Verdict(r.unbiased_chain_ok())
      << " rho = 1/gamma chain: max |Bias E[delta]| " << r.unbiased_chain_bias
      << "\n";
  out << Verdict(r.out_of_window_condition == 0)
      << " rho = 3/gamma chain: condition met on " << r.out_of_window_condition
      << " transitions (expected 0); ordering holds on "
      << r.out_of_window_ordered << " (no claim)\n";
  out << Verdict(r.random_ok()) << " random instances: "
      << r.random_with_condition << "/" << r.random_instances
      << " with rho in window (" << r.random_attempts << " drawn), "
      << r.random_transitions_in_window << " in-window transitions, "
      << r.random_violations << " ordering violations\n";
  out << "INFO variance condition met on " << r.random_variance_condition
      << " random transitions; variance ordering held on "
      << r.random_variance_ordered << " of them\n";
}

int RunBiasSuite(const BiasSuiteOptions& options, const std::string& dir,
                 std::ostream& log) {
  const Suite suite = Compute(options);
  for (const auto& [name, report] : suite.reports) {
    std::ostringstream pairs, transitions;
    WritePairCsv(report, pairs);
    WriteTransitionCsv(report, transitions);
    WriteTextFile(dir + "/" + name + "_pairs.csv", pairs.str());
    WriteTextFile(dir + "/" + name + "_transitions.csv", transitions.str());
  }
  std::ostringstream summary;
  WriteBiasSummary(suite.result, summary);
  WriteTextFile(dir + "/summary.txt", summary.str());
  log << summary.str();
  return suite.result.all_ok() ? 0 : 1;
}

}  // namespace tdulab
