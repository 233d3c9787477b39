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
#include <sstream>
#include <vector>

#include "doctest.h"
#include "tdulab/bias/constructions.h"
#include "tdulab/bias/moments.h"
#include "tdulab/bias/report.h"
#include "tdulab/bias/tabular_mdp.h"
#include "tdulab/metrics/csv.h"
#include "tdulab/nn/rng.h"

namespace tdulab {
namespace {

int SampleCategorical(const std::vector<double>& p, RngStream& rng) {
  const double u = rng.Uniform();
  double c = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    c += p[i];
    if (u < c) return static_cast<int>(i);
  }
  return static_cast<int>(p.size()) - 1;
}

std::vector<double> Row(const TabularMdp& m, int s, int a) {
  std::vector<double> row(m.num_states);
  for (int t = 0; t < m.num_states; ++t) row[t] = m.P(s, a, t);
  return row;
}

struct Stats {
  double mean = 0.0;
  double variance = 0.0;  // population
  double fourth = 0.0;    // central fourth moment
};

Stats Summarize(const std::vector<double>& x) {
  Stats s;
  for (double v : x) s.mean += v;
  s.mean /= x.size();
  for (double v : x) {
    const double d = v - s.mean;
    s.variance += d * d;
    s.fourth += d * d * d * d;
  }
  s.variance /= x.size();
  s.fourth /= x.size();
  return s;
}

TEST_CASE("exact q: geometric series, zero rewards, singular system") {
  TabularMdp one = MakeTabularMdp(1, 1, 0.5);
  one.P(0, 0, 0) = 1.0;
  one.R(0, 0) = 1.0;
  CHECK(ExactQ(one)[0] == doctest::Approx(2.0).epsilon(1e-14));

  RngStream rng(1);
  TabularMdp zero = RandomMdp(4, 2, 0.9, rng);
  for (double& r : zero.rewards) r = 0.0;
  for (double q : ExactQ(zero)) CHECK(std::abs(q) <= 1e-15);

  one.discount = 1.0;
  CHECK_THROWS_AS(ExactQ(one), std::domain_error);
}

TEST_CASE("exact q is a fixed point of the Bellman backup") {
  RngStream rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const TabularMdp m = RandomMdp(6, 3, 0.95, rng);
    const QTable q = ExactQ(m);
    const QTable backup = BellmanBackup(m, q);
    for (std::size_t i = 0; i < q.size(); ++i) {
      CHECK(std::abs(q[i] - backup[i]) <= 1e-10);
    }
  }
}

TEST_CASE("exact q matches Monte-Carlo rollouts") {
  RngStream rng(3);
  const TabularMdp m = RandomMdp(5, 2, 0.8, rng);
  const QTable q = ExactQ(m);
  constexpr int kRollouts = 10000;
  constexpr int kHorizon = 150;  // 0.8^150 is negligible
  for (int s = 0; s < 5; ++s) {
    for (int a = 0; a < 2; ++a) {
      std::vector<double> returns(kRollouts);
      for (double& g : returns) {
        int state = s, action = a;
        double discount = 1.0;
        g = 0.0;
        for (int t = 0; t < kHorizon; ++t) {
          g += discount * m.R(state, action);
          discount *= m.discount;
          state = SampleCategorical(Row(m, state, action), rng);
          action = m.policy[state];
        }
      }
      const Stats st = Summarize(returns);
      const double se = std::sqrt(st.variance / kRollouts);
      CHECK(std::abs(st.mean - q[m.pair(s, a)]) < 3.0 * se + 1e-12);
    }
  }
}

TEST_CASE("mdp validation") {
  TabularMdp m = MakeTabularMdp(2, 1, 0.9);
  CHECK_THROWS_AS(m.Validate(), std::invalid_argument);  // rows sum to 0
  m.P(0, 0, 1) = 1.0;
  m.P(1, 0, 0) = 1.0;
  CHECK_NOTHROW(m.Validate());
  m.policy[0] = 3;
  CHECK_THROWS_AS(m.Validate(), std::invalid_argument);
}

TEST_CASE("belief moments: single member, symmetric pair, sampling oracle") {
  RngStream rng(4);
  MdpBelief single{{RandomMdp(3, 2, 0.9, rng)}, {1.0}};
  for (double v : BeliefMoments(single).variance) CHECK(v == 0.0);

  TabularMdp a = MakeTabularMdp(2, 1, 0.0);
  a.P(0, 0, 1) = 1.0;
  a.P(1, 0, 1) = 1.0;
  TabularMdp b = a;
  a.R(0, 0) = 1.0;
  b.R(0, 0) = -1.0;
  const BeliefMomentTables pm = BeliefMoments(MdpBelief{{a, b}, {0.5, 0.5}});
  CHECK(pm.mean[0] == 0.0);
  CHECK(pm.variance[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pm.variance[1] == 0.0);

  MdpBelief three;
  for (int i = 0; i < 3; ++i) {
    TabularMdp m = RandomMdp(3, 2, 0.9, rng);
    m.policy = three.mdps.empty() ? m.policy : three.mdps.front().policy;
    three.mdps.push_back(m);
  }
  three.probabilities = {0.2, 0.5, 0.3};
  const BeliefMomentTables exact = BeliefMoments(three);
  constexpr int kDraws = 100000;
  std::vector<std::vector<double>> draws(6, std::vector<double>(kDraws));
  for (int d = 0; d < kDraws; ++d) {
    const int member = SampleCategorical(three.probabilities, rng);
    for (int p = 0; p < 6; ++p) draws[p][d] = exact.q[member][p];
  }
  for (int p = 0; p < 6; ++p) {
    const Stats st = Summarize(draws[p]);
    CHECK(std::abs(st.mean - exact.mean[p]) <
          3.0 * std::sqrt(exact.variance[p] / kDraws) + 1e-12);
    const double var_se =
        std::sqrt((st.fourth - st.variance * st.variance) / kDraws);
    CHECK(std::abs(st.variance - exact.variance[p]) < 3.0 * var_se + 1e-12);
  }
  // Each member's Q comes from its own exact solve.
  for (int i = 0; i < 3; ++i) CHECK(exact.q[i] == ExactQ(three.mdps[i]));
}

TEST_CASE("belief validation rejects bad probabilities") {
  RngStream rng(5);
  const TabularMdp m = RandomMdp(2, 2, 0.9, rng);
  CHECK_THROWS_AS((MdpBelief{{m, m}, {0.7, 0.7}}.Validate()),
                  std::invalid_argument);
  CHECK_THROWS_AS((MdpBelief{{m, m}, {1.5, -0.5}}.Validate()),
                  std::invalid_argument);
  CHECK_THROWS_AS((MdpBelief{{m}, {1.0, 0.0}}.Validate()),
                  std::invalid_argument);
}

TEST_CASE("posterior moments: degenerate posterior has zero variance") {
  RngStream rng(6);
  const MdpBelief belief{{RandomMdp(3, 2, 0.9, rng)}, {1.0}};
  QTable q(6);
  for (double& v : q) v = rng.Normal();
  const PosteriorMomentTables pm =
      PosteriorMoments(TabularPosterior({q}, {1.0}), belief);
  for (double v : pm.variance) CHECK(v == 0.0);
  for (double v : pm.backup_variance) CHECK(v == 0.0);
  for (const DeltaMoments& d : pm.deltas) CHECK(d.variance == 0.0);
  for (int p = 0; p < 6; ++p) CHECK(pm.mean[p] == q[p]);
}

TEST_CASE("posterior moments match enumeration for a 50-member set") {
  RngStream rng(7);
  const int kStates = 4, kActions = 2, kDim = 3, kMembers = 50;
  MdpBelief belief;
  belief.mdps.push_back(RandomMdp(kStates, kActions, 0.9, rng));
  TabularMdp second = RandomMdp(kStates, kActions, 0.9, rng);
  second.policy = belief.mdps[0].policy;
  belief.mdps.push_back(second);
  belief.probabilities = {0.4, 0.6};
  const TabularMdp mix = belief.Mixture();

  std::vector<double> features(kStates * kActions * kDim);
  for (double& f : features) f = rng.Normal();
  std::vector<std::vector<double>> weights(kMembers, std::vector<double>(kDim));
  std::vector<double> probabilities(kMembers);
  double total = 0.0;
  for (int i = 0; i < kMembers; ++i) {
    for (double& w : weights[i]) w = rng.Normal();
    probabilities[i] = rng.Uniform(0.1, 1.0);
    total += probabilities[i];
  }
  for (double& p : probabilities) p /= total;
  const ParamPosterior post = FinalLayerPosterior(
      kStates * kActions, kDim, features, weights, probabilities);
  const PosteriorMomentTables pm = PosteriorMoments(post, belief);

  auto q_of = [&](int member, int pair) {
    double v = 0.0;
    for (int j = 0; j < kDim; ++j) v += weights[member][j] * features[pair * kDim + j];
    return v;
  };
  for (int p = 0; p < kStates * kActions; ++p) {
    double m = 0.0, m2 = 0.0, bm = 0.0, bm2 = 0.0;
    const int s = p / kActions, a = p % kActions;
    for (int i = 0; i < kMembers; ++i) {
      const double q = q_of(i, p);
      double backup = mix.R(s, a);
      for (int t = 0; t < kStates; ++t) {
        backup += mix.discount * mix.P(s, a, t) * q_of(i, mix.pair(t, mix.policy[t]));
      }
      m += probabilities[i] * q;
      m2 += probabilities[i] * q * q;
      bm += probabilities[i] * backup;
      bm2 += probabilities[i] * backup * backup;
    }
    CHECK(pm.mean[p] == doctest::Approx(m).epsilon(1e-12));
    CHECK(pm.variance[p] == doctest::Approx(m2 - m * m).epsilon(1e-9));
    CHECK(pm.backup_mean[p] == doctest::Approx(bm).epsilon(1e-12));
    CHECK(pm.backup_variance[p] == doctest::Approx(bm2 - bm * bm).epsilon(1e-9));
  }
  REQUIRE(pm.transitions.size() == pm.deltas.size());
  CHECK(pm.transitions.size() == static_cast<std::size_t>(kStates * kActions * kStates));
  for (std::size_t k = 0; k < pm.transitions.size(); ++k) {
    const TransitionKey& key = pm.transitions[k];
    const int here = mix.pair(key.state, key.action);
    const int next = mix.pair(key.next_state, key.next_action);
    double m = 0.0, m2 = 0.0, cross = 0.0;
    for (int i = 0; i < kMembers; ++i) {
      const double delta = key.reward + 0.9 * q_of(i, next) - q_of(i, here);
      m += probabilities[i] * delta;
      m2 += probabilities[i] * delta * delta;
      cross += probabilities[i] * q_of(i, next) * q_of(i, here);
    }
    CHECK(key.reward == mix.R(key.state, key.action));
    CHECK(pm.deltas[k].mean == doctest::Approx(m).epsilon(1e-12));
    CHECK(pm.deltas[k].variance == doctest::Approx(m2 - m * m).epsilon(1e-9));
    CHECK(pm.deltas[k].cross == doctest::Approx(cross).epsilon(1e-12));
  }
}

TEST_CASE("gaussian posterior: quadratic form and sampling oracle") {
  RngStream rng(8);
  const MdpBelief belief{{RandomMdp(2, 2, 0.9, rng)}, {1.0}};
  const std::vector<double> features = {1, 0, 0, 1, 1, 1, 2, -1};  // 4 x 2
  const std::vector<double> mean = {0.5, -0.25};
  const std::vector<double> cov = {2.0, 0.3, 0.3, 1.0};
  const ParamPosterior post =
      GaussianLinearPosterior(4, 2, features, mean, cov);
  const PosteriorMomentTables pm = PosteriorMoments(post, belief);
  CHECK(pm.variance[0] == doctest::Approx(2.0));
  CHECK(pm.variance[1] == doctest::Approx(1.0));
  CHECK(pm.variance[2] == doctest::Approx(2.0 + 0.6 + 1.0));
  CHECK(pm.variance[3] == doctest::Approx(4 * 2.0 - 4 * 0.3 + 1.0));
  CHECK(pm.mean[3] == doctest::Approx(1.0 + 0.25));

  constexpr int kDraws = 100000;
  const auto samples = SampleWeights(post, kDraws, rng);
  for (int p = 0; p < 4; ++p) {
    std::vector<double> q(kDraws);
    for (int d = 0; d < kDraws; ++d) q[d] = post.Values(samples[d])[p];
    const Stats st = Summarize(q);
    CHECK(std::abs(st.mean - pm.mean[p]) <
          3.0 * std::sqrt(pm.variance[p] / kDraws));
    const double var_se =
        std::sqrt((st.fourth - st.variance * st.variance) / kDraws);
    CHECK(std::abs(st.variance - pm.variance[p]) < 3.0 * var_se);
  }
}

TEST_CASE("finite posterior sampling follows member probabilities") {
  RngStream rng(9);
  const ParamPosterior post =
      TabularPosterior({{0.0}, {1.0}, {2.0}}, {0.5, 0.3, 0.2});
  std::vector<int> counts(3, 0);
  constexpr int kDraws = 60000;
  for (const auto& w : SampleWeights(post, kDraws, rng)) {
    ++counts[static_cast<int>(w[0])];
  }
  const std::vector<double> p = {0.5, 0.3, 0.2};
  double chi2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double e = p[i] * kDraws;
    chi2 += (counts[i] - e) * (counts[i] - e) / e;
  }
  CHECK(chi2 < 9.21);  // 1% critical value, 2 degrees of freedom
}

TEST_CASE("push-forward posteriors satisfy the moment equations") {
  RngStream rng(10);
  for (int trial = 0; trial < 5; ++trial) {
    const BiasInstance inst = ConsistencyInstance(2 + trial, 2, 3, 0.9, rng);
    const MomentReport report = BellmanResiduals(inst.posterior, inst.belief);
    CHECK(report.max_abs_mean_residual() <= 1e-10);
    CHECK(report.max_abs_variance_residual() <= 1e-10);
    CHECK(report.all_finite());
    for (const TransitionReport& t : report.transitions) {
      CHECK(std::abs(t.bias_mean_q) <= 1e-10);
    }
  }
}

TEST_CASE("final-layer posteriors violate the mean equation") {
  RngStream rng(11);
  const BiasInstance inst = FinalLayerInstance(8, 2, 2, 6, 0.9, rng);
  const MomentReport report = BellmanResiduals(inst.posterior, inst.belief);
  CHECK(report.feature_dim == 2);
  CHECK(report.unique_prediction_count > report.feature_dim + 1);
  CHECK(report.max_abs_mean_residual() > 1e-6);
}

TEST_CASE("unit ratios give the squared (gamma - 1) variance identity") {
  RngStream rng(12);
  for (double gamma : {0.5, 0.9, 0.99}) {
    const BiasInstance inst = SymmetricCycleInstance(gamma, rng);
    const MomentReport report = BellmanResiduals(inst.posterior, inst.belief);
    REQUIRE_FALSE(inst.designed.empty());
    for (const TransitionKey& key : inst.designed) {
      bool found = false;
      for (const TransitionReport& t : report.transitions) {
        if (t.key.state != key.state || t.key.next_state != key.next_state ||
            t.key.action != key.action) {
          continue;
        }
        found = true;
        REQUIRE(t.rho.has_value());
        REQUIRE(t.phi.has_value());
        REQUIRE(t.kappa.has_value());
        REQUIRE(t.alpha.has_value());
        CHECK(*t.rho == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(*t.phi == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(*t.kappa == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(*t.alpha == doctest::Approx(1.0).epsilon(1e-12));
        const double lhs = std::abs(t.bias_variance_delta);
        const double rhs = (gamma - 1) * (gamma - 1) * std::abs(t.bias_variance_q);
        CHECK(std::abs(lhs - rhs) <= 1e-10);
        CHECK(std::abs(t.bias_variance_q) > 1e-3);
      }
      CHECK(found);
    }
  }
}

TEST_CASE("bias ratio 1/gamma removes the mean bias; 3/gamma is outside") {
  RngStream rng(13);
  const double gamma = 0.9;
  const BiasInstance unbiased = ScaledBiasChainInstance(6, 1.0 / gamma, gamma, rng);
  const MomentReport r1 = BellmanResiduals(unbiased.posterior, unbiased.belief);
  const BiasSummary s1 = BiasComparison(r1);
  int checked = 0;
  for (std::size_t i = 0; i < r1.transitions.size(); ++i) {
    const TransitionReport& t = r1.transitions[i];
    for (const TransitionKey& key : unbiased.designed) {
      if (t.key.state == key.state && t.key.next_state == key.next_state &&
          t.key.action == key.action) {
        ++checked;
        CHECK(*t.rho == doctest::Approx(1.0 / gamma).epsilon(1e-12));
        CHECK(std::abs(t.bias_mean_delta) <= 1e-10);
        CHECK(std::abs(t.bias_mean_q) > 1e-3);
        CHECK(s1.verdicts[i].mean_condition == true);
        CHECK(s1.verdicts[i].mean_ordering);
      }
    }
  }
  CHECK(checked == static_cast<int>(unbiased.designed.size()));

  const BiasInstance outside = ScaledBiasChainInstance(6, 3.0 / gamma, gamma, rng);
  const MomentReport r3 = BellmanResiduals(outside.posterior, outside.belief);
  const BiasSummary s3 = BiasComparison(r3);
  for (std::size_t i = 0; i < r3.transitions.size(); ++i) {
    for (const TransitionKey& key : outside.designed) {
      if (r3.transitions[i].key.state == key.state &&
          r3.transitions[i].key.next_state == key.next_state &&
          r3.transitions[i].key.action == key.action) {
        CHECK(s3.verdicts[i].mean_condition == false);
      }
    }
  }
}

TEST_CASE("mean bias ordering holds whenever the ratio window holds") {
  RngStream rng(14);
  int in_window = 0;
  for (int instance = 0; instance < 100; ++instance) {
    const BiasInstance inst = RandomBiasInstance(5, 2, 0.9, rng);
    const MomentReport report = BellmanResiduals(inst.posterior, inst.belief);
    const BiasSummary summary = BiasComparison(report);
    for (const TransitionVerdict& v : summary.verdicts) {
      if (v.mean_condition == true) {
        ++in_window;
        CHECK(v.mean_ordering);
      }
    }
    CHECK(summary.mean_agreement() == 1.0);
  }
  CHECK(in_window > 100);
}

TEST_CASE("zero bias denominators leave ratios undefined") {
  RngStream rng(15);
  const TabularMdp m = RandomMdp(3, 2, 0.9, rng);
  const MdpBelief belief{{m}, {1.0}};
  // The posterior holds the same numbers as the belief, so B is exactly 0.
  const ParamPosterior post = TabularPosterior({ExactQ(m)}, {1.0});
  const MomentReport report = BellmanResiduals(post, belief);
  for (const TransitionReport& t : report.transitions) {
    CHECK(t.bias_mean_q == 0.0);
    CHECK_FALSE(t.rho.has_value());
  }
  const BiasSummary summary = BiasComparison(report);
  for (const TransitionVerdict& v : summary.verdicts) {
    CHECK_FALSE(v.mean_condition.has_value());
    CHECK_FALSE(v.variance_condition.has_value());
  }
  CHECK(summary.num_mean_undefined == static_cast<int>(report.transitions.size()));
  CHECK(summary.mean_agreement() == 1.0);
}

TEST_CASE("report csv has one row per pair and transition") {
  RngStream rng(16);
  const BiasInstance inst = RandomBiasInstance(3, 2, 0.9, rng);
  const MomentReport report = BellmanResiduals(inst.posterior, inst.belief);
  std::ostringstream pairs, transitions;
  WritePairCsv(report, pairs);
  WriteTransitionCsv(report, transitions);
  const auto pair_rows = ParseCsv(pairs.str());
  const auto transition_rows = ParseCsv(transitions.str());
  CHECK(pair_rows.size() == report.pairs.size() + 1);
  CHECK(transition_rows.size() == report.transitions.size() + 1);
  CHECK(pair_rows[0].size() == 13);
  CHECK(transition_rows[0].size() == 20);
  CHECK(pair_rows[0][0] == "state");
  CHECK(transition_rows[0][12] == "rho");
}

TEST_CASE("posterior validation catches shape errors") {
  ParamPosterior post = TabularPosterior({{1.0, 2.0}}, {1.0});
  CHECK_NOTHROW(post.Validate(1));
  post.probabilities = {0.5};
  CHECK_THROWS_AS(post.Validate(1), std::invalid_argument);
  post = TabularPosterior({{1.0, 2.0}}, {1.0});
  post.paired_member = {3};
  CHECK_THROWS_AS(post.Validate(2), std::invalid_argument);
  CHECK_THROWS_AS(
      GaussianLinearPosterior(1, 2, {1.0, 0.0}, {0.0, 0.0}, {1.0, 0.2, 0.3, 1.0})
          .Validate(1),
      std::invalid_argument);
}

}  // namespace
}  // namespace tdulab
