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

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "tdulab/agents/agent.h"
#include "tdulab/agents/checkpoint.h"
#include "tdulab/agents/config.h"
#include "tdulab/agents/ensemble.h"
#include "tdulab/agents/loss.h"
#include "tdulab/agents/reference.h"
#include "tdulab/agents/td.h"
#include "tdulab/agents/variants.h"
#include "tdulab/envs/deep_sea.h"
#include "tdulab/nn/gradcheck.h"
#include "tdulab/nn/rng.h"

namespace tdulab {
namespace {

// Independent forward pass used by the oracles below.
std::vector<double> NaiveForward(const MlpParams& p, std::vector<double> x) {
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const auto& w = p.layers[l].weight;
    std::vector<double> y(w.rows());
    for (int o = 0; o < w.rows(); ++o) {
      double s = p.layers[l].bias[o];
      for (int i = 0; i < w.cols(); ++i) s += w(o, i) * x[i];
      y[o] = (l + 1 < p.layers.size() && s < 0.0) ? 0.0 : s;
    }
    x = std::move(y);
  }
  return x;
}

std::vector<double> NaiveQ(const MlpParams& net, const MlpParams& prior,
                           const std::vector<double>& obs, double lambda) {
  std::vector<double> q = NaiveForward(net, obs);
  const std::vector<double> p = NaiveForward(prior, obs);
  for (std::size_t a = 0; a < q.size(); ++a) q[a] += lambda * p[a];
  return q;
}

int ScanArgmax(const std::vector<double>& q) {
  int best = 0;
  for (int a = 0; a < static_cast<int>(q.size()); ++a) {
    bool beats_all = true;
    for (int b = 0; b < a; ++b) beats_all = beats_all && q[a] > q[b];
    for (int b = a + 1; b < static_cast<int>(q.size()); ++b) {
      beats_all = beats_all && q[a] >= q[b];
    }
    if (beats_all) return a;
  }
  return best;
}

double NaiveTdError(const Head& head, const Transition& t,
                    const TduConfig& config, double reward) {
  const double lambda = config.prior_scale;
  const double q_sa =
      NaiveQ(head.online, head.prior, t.observation, lambda)[t.action];
  double bootstrap = 0.0;
  if (t.discount != 0.0) {
    const std::vector<double> q_next_target =
        NaiveQ(head.target, head.prior_target, t.next_observation, lambda);
    const int a_next =
        config.double_dqn
            ? ScanArgmax(NaiveQ(head.online, head.prior, t.next_observation,
                                lambda))
            : ScanArgmax(q_next_target);
    bootstrap = t.discount * config.discount * q_next_target[a_next];
  }
  return reward + bootstrap - q_sa;
}

double TwoPassStd(const std::vector<double>& x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= x.size();
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (x.size() - 1));
}

TduConfig SmallConfig(int k, int n) {
  TduConfig c;
  c.num_exploiters = k;
  c.num_explorers = n;
  c.hidden_sizes = {6, 5};
  c.batch_size = 8;
  return c;
}

Batch RandomBatch(const TduConfig& config, int obs_size, int batch_size,
                  RngStream& rng, double mask_probability = 0.7) {
  Batch batch;
  for (int b = 0; b < batch_size; ++b) {
    Transition t;
    t.observation.resize(obs_size);
    t.next_observation.resize(obs_size);
    for (double& x : t.observation) x = rng.Normal();
    for (double& x : t.next_observation) x = rng.Normal();
    t.action = static_cast<int>(rng.UniformInt(2));
    t.reward = rng.Uniform(-1.0, 1.0);
    t.discount = rng.Bernoulli(0.2) ? 0.0 : 1.0;
    t.mask.resize(config.ensemble_size());
    t.noise.resize(config.ensemble_size());
    for (auto& m : t.mask) m = rng.Bernoulli(mask_probability) ? 1 : 0;
    for (auto& z : t.noise) z = rng.Normal();
    t.count_bonus = rng.Uniform();
    batch.push_back(std::move(t));
  }
  return batch;
}

// Ensemble whose targets differ from the online networks, as after training.
EnsembleState TrainedLikeEnsemble(const TduConfig& config, int obs_size,
                                  RngStream& rng) {
  EnsembleState e = InitEnsemble(config, obs_size, 2, rng.Split("init"));
  for (Head& h : e.heads) {
    std::vector<double> flat = Flatten(h.target);
    for (double& v : flat) v += 0.05 * rng.Normal();
    Unflatten(flat, &h.target);
  }
  return e;
}

// Distance of a batch from the points where the loss is not differentiable:
// ReLU kinks of the online networks and double-DQN argmax switches.
double KinkDistance(const EnsembleState& e, const Batch& batch,
                    const TduConfig& config) {
  double smallest = std::numeric_limits<double>::infinity();
  for (const Head& h : e.heads) {
    for (const Transition& t : batch) {
      for (const auto* obs : {&t.observation, &t.next_observation}) {
        Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(
            obs->data(), static_cast<Eigen::Index>(obs->size()));
        for (std::size_t l = 0; l + 1 < h.online.layers.size(); ++l) {
          const Eigen::VectorXd z =
              h.online.layers[l].weight * x + h.online.layers[l].bias;
          smallest = std::min(smallest, z.cwiseAbs().minCoeff());
          x = z.cwiseMax(0.0);
        }
      }
      if (t.discount != 0.0) {
        const Eigen::VectorXd q =
            QValues(h, t.next_observation, config.prior_scale);
        smallest = std::min(smallest, std::abs(q[0] - q[1]));
      }
    }
  }
  return smallest;
}

std::vector<double> FlattenOnline(const EnsembleState& e) {
  std::vector<double> out;
  for (const Head& h : e.heads) {
    const std::vector<double> f = Flatten(h.online);
    out.insert(out.end(), f.begin(), f.end());
  }
  return out;
}

void UnflattenOnline(std::span<const double> flat, EnsembleState* e) {
  std::size_t offset = 0;
  for (Head& h : e->heads) {
    const std::size_t n = h.online.num_parameters();
    Unflatten(flat.subspan(offset, n), &h.online);
    offset += n;
  }
}

std::vector<double> FlattenGrads(const std::vector<MlpGrad>& grads) {
  std::vector<double> out;
  for (const MlpGrad& g : grads) {
    const std::vector<double> f = Flatten(g);
    out.insert(out.end(), f.begin(), f.end());
  }
  return out;
}

TEST_CASE("config defaults and validation") {
  const TduConfig c;
  CHECK(c.discount == 0.99);
  CHECK(c.batch_size == 32);
  CHECK(c.ensemble_size() == 20);
  CHECK(c.learning_rate == 0.001);
  CHECK(c.replay_capacity == 10000);
  CHECK(c.mask_probability == 1.0);
  CHECK(c.target_update_period == 4);
  CHECK_NOTHROW(c.Validate());
  TduConfig bad = c;
  bad.num_exploiters = 1;
  CHECK_THROWS_AS(bad.Validate(), std::invalid_argument);
  bad = c;
  bad.beta = -1.0;
  CHECK_THROWS_AS(bad.Validate(), std::invalid_argument);
  bad = c;
  bad.discount = 0.0;
  CHECK_THROWS_AS(bad.Validate(), std::invalid_argument);
  for (Variant v : {Variant::kTdu, Variant::kBdqn, Variant::kQu, Variant::kQUcb,
                    Variant::kQex, Variant::kCts, Variant::kTduBandit}) {
    CHECK(ParseVariant(VariantName(v)) == v);
  }
  CHECK_FALSE(ParseVariant("nope").has_value());
}

TEST_CASE("q values compose online and prior networks") {
  RngStream rng(1);
  TduConfig config = SmallConfig(2, 1);
  EnsembleState e = InitEnsemble(config, 4, 2, rng);
  const std::vector<double> obs = {0.5, -1.0, 0.25, 2.0};
  const Head& head = e.heads[0];
  const Eigen::VectorXd pure = QValues(head, obs, 0.0);
  const Eigen::VectorXd online = MlpForward(head.online, obs);
  for (int a = 0; a < 2; ++a) CHECK(pure[a] == online[a]);

  Head zero = head;
  zero.online = ZerosLike(head.online);
  const Eigen::VectorXd scaled = QValues(zero, obs, 3.0);
  const Eigen::VectorXd prior = MlpForward(head.prior, obs);
  for (int a = 0; a < 2; ++a) CHECK(scaled[a] == doctest::Approx(3.0 * prior[a]));

  for (int trial = 0; trial < 50; ++trial) {
    const Head& h = e.heads[trial % e.size()];
    std::vector<double> x(4);
    for (double& v : x) v = rng.Normal();
    const Eigen::VectorXd q = QValues(h, x, 3.0);
    const std::vector<double> ref = NaiveQ(h.online, h.prior, x, 3.0);
    const Eigen::VectorXd qt = TargetQValues(h, x, 3.0);
    const std::vector<double> ref_t = NaiveQ(h.target, h.prior_target, x, 3.0);
    for (int a = 0; a < 2; ++a) {
      CHECK(std::abs(q[a] - ref[a]) <= 1e-12);
      CHECK(std::abs(qt[a] - ref_t[a]) <= 1e-12);
    }
  }
}

TEST_CASE("greedy action breaks ties toward the lowest index") {
  CHECK(GreedyAction(Eigen::Vector2d(0.0, 1.0)) == 1);
  CHECK(GreedyAction(Eigen::Vector2d(2.0, 2.0)) == 0);
  Eigen::VectorXd tie(4);
  tie << 1.0, 3.0, 3.0, -1.0;
  CHECK(GreedyAction(tie) == 1);
  RngStream rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> q(5);
    for (double& v : q) v = static_cast<double>(rng.UniformInt(4));
    const Eigen::VectorXd qv = Eigen::Map<Eigen::VectorXd>(q.data(), 5);
    CHECK(GreedyAction(qv) == ScanArgmax(q));
  }
}

TEST_CASE("td error examples and duplicate implementation") {
  RngStream rng(3);
  TduConfig config = SmallConfig(2, 0);
  config.prior_scale = 0.0;
  EnsembleState e = InitEnsemble(config, 3, 2, rng);
  Head zero = e.heads[0];
  zero.online = ZerosLike(zero.online);
  zero.target = ZerosLike(zero.target);
  Transition t;
  t.observation = {1.0, 0.0, 0.0};
  t.next_observation = {0.0, 1.0, 0.0};
  t.reward = 1.0;
  CHECK(TdError(zero, t, config) == 1.0);

  // Terminal transition with Q(s, a) = 2.
  Head two = zero;
  two.online.layers.back().bias.setConstant(2.0);
  t.discount = 0.0;
  CHECK(TdError(two, t, config) == -1.0);
  CHECK(TdError(two, t, config, 3.0) == 1.0);

  for (bool double_dqn : {true, false}) {
    TduConfig c = SmallConfig(3, 2);
    c.double_dqn = double_dqn;
    EnsembleState ens = TrainedLikeEnsemble(c, 4, rng);
    const Batch batch = RandomBatch(c, 4, 40, rng);
    for (const Transition& tr : batch) {
      for (const Head& h : ens.heads) {
        const double r = tr.reward + 0.3;
        CHECK(std::abs(TdError(h, tr, c, r) - NaiveTdError(h, tr, c, r)) <=
              1e-12);
      }
    }
  }
}

TEST_CASE("tdu sigma: examples, two-pass oracle, scale equivariance") {
  const std::vector<double> equal = {0.75, 0.75, 0.75};
  CHECK(TduSigma(equal) == 0.0);
  const std::vector<double> inexact = {0.7, 0.7, 0.7};
  CHECK(TduSigma(inexact) <= 1e-15);
  const std::vector<double> pair = {0.0, 2.0};
  CHECK(TduSigma(pair) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(TduSigma(std::vector<double>{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(TduSigma(std::vector<double>{}), std::invalid_argument);

  RngStream rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> d(20);
    for (double& v : d) v = 3.0 * rng.Normal() + 1.0;
    const double sigma = TduSigma(d);
    CHECK(sigma >= 0.0);
    CHECK(std::abs(sigma - TwoPassStd(d)) <= 1e-12);
    const double c = rng.Uniform(-5.0, 5.0);
    std::vector<double> scaled = d;
    for (double& v : scaled) v *= c;
    CHECK(TduSigma(scaled) == doctest::Approx(std::abs(c) * sigma).epsilon(1e-12));
  }
  CHECK(QuSigma(pair) == doctest::Approx(std::sqrt(2.0)));
  CHECK(QuSigma(equal) == 0.0);
}

TEST_CASE("loss reduces to masked bootstrapped dqn when beta and N are zero") {
  RngStream rng(5);
  TduConfig config = SmallConfig(4, 0);
  config.beta = 0.0;
  config.prior_scale = 0.0;
  EnsembleState e = TrainedLikeEnsemble(config, 3, rng);
  const Batch batch = RandomBatch(config, 3, 16, rng);
  LossOptions opts;
  opts.execution = Execution::kSerial;
  const EnsembleLossResult r = EnsembleTdLoss(e, batch, config, opts);
  double sum = 0.0;
  for (int h = 0; h < e.size(); ++h) {
    for (const Transition& t : batch) {
      const double d = NaiveTdError(e.heads[h], t, config, t.reward);
      sum += t.mask[h] * d * d;
    }
  }
  const double expected = sum / (2.0 * e.size() * batch.size());
  CHECK(r.loss == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("tdu loss value matches an independent per-transition oracle") {
  RngStream rng(6);
  TduConfig config = SmallConfig(3, 2);
  config.beta = 1.7;
  config.noise_scale = 0.2;
  EnsembleState e = TrainedLikeEnsemble(config, 4, rng);
  const Batch batch = RandomBatch(config, 4, 10, rng);
  const EnsembleLossResult r = EnsembleTdLoss(e, batch, config);
  double sum = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Transition& t = batch[b];
    std::vector<double> deltas;
    for (int k = 0; k < 3; ++k) {
      deltas.push_back(NaiveTdError(e.heads[k], t, config,
                                    t.reward + 0.2 * t.noise[k]));
    }
    const double sigma = TwoPassStd(deltas);
    CHECK(r.signal[b] == doctest::Approx(sigma).epsilon(1e-12));
    for (int h = 0; h < e.size(); ++h) {
      double reward = t.reward + 0.2 * t.noise[h];
      if (h >= 3) reward += 1.7 * sigma;
      const double d = NaiveTdError(e.heads[h], t, config, reward);
      CHECK(r.td_errors(h, b) == doctest::Approx(d).epsilon(1e-12));
      sum += t.mask[h] * d * d;
    }
  }
  CHECK(r.loss == doctest::Approx(sum / (2.0 * 5 * 10)).epsilon(1e-12));
}

TEST_CASE("all masks zero gives zero loss and zero gradients") {
  RngStream rng(7);
  TduConfig config = SmallConfig(2, 2);
  EnsembleState e = TrainedLikeEnsemble(config, 3, rng);
  const Batch batch = RandomBatch(config, 3, 8, rng, 0.0);
  const EnsembleLossResult r = EnsembleTdLoss(e, batch, config);
  CHECK(r.loss == 0.0);
  for (double g : FlattenGrads(r.grads)) CHECK(g == 0.0);
}

TEST_CASE("gradients match finite differences with the signal frozen") {
  RngStream rng(8);
  int passed = 0;
  for (int trial = 0; trial < 20;) {
    TduConfig config = SmallConfig(4, 2);
    config.hidden_sizes = {5};
    config.beta = 1.0 + trial % 3;
    EnsembleState e = TrainedLikeEnsemble(config, 3, rng);
    const Batch batch = RandomBatch(config, 3, 8, rng);
    if (KinkDistance(e, batch, config) < 1e-3) continue;
    ++trial;
    const EnsembleLossResult r = EnsembleTdLoss(e, batch, config);
    const std::vector<double> signal = r.signal;
    LossOptions frozen;
    frozen.frozen_signal = signal;
    frozen.compute_gradients = false;
    const GradCheckResult check = CheckGradient(
        FlattenOnline(e), FlattenGrads(r.grads),
        [&](std::span<const double> flat) {
          EnsembleState copy = e;
          UnflattenOnline(flat, &copy);
          return EnsembleTdLoss(copy, batch, config, frozen).loss;
        });
    CHECK_MESSAGE(check.passed(), "trial ", trial, " relative error ",
                  check.max_relative_error);
    passed += check.passed();
  }
  CHECK(passed == 20);
}

TEST_CASE("without freezing, perturbing exploiters moves the signal") {
  RngStream rng(9);
  TduConfig config = SmallConfig(3, 2);
  EnsembleState e = TrainedLikeEnsemble(config, 3, rng);
  const Batch batch = RandomBatch(config, 3, 8, rng);
  const std::vector<double> before = EnsembleTdLoss(e, batch, config).signal;
  e.heads[0].online.layers.back().bias.array() += 0.3;
  const std::vector<double> after = EnsembleTdLoss(e, batch, config).signal;
  CHECK(before != after);
}

TEST_CASE("exploiter gradients do not depend on beta") {
  RngStream rng(10);
  TduConfig config = SmallConfig(3, 3);
  EnsembleState e = TrainedLikeEnsemble(config, 4, rng);
  const Batch batch = RandomBatch(config, 4, 12, rng);
  config.beta = 0.0;
  const EnsembleLossResult a = EnsembleTdLoss(e, batch, config);
  config.beta = 5.0;
  const EnsembleLossResult b = EnsembleTdLoss(e, batch, config);
  for (int k = 0; k < 3; ++k) CHECK(Flatten(a.grads[k]) == Flatten(b.grads[k]));
  bool explorer_changed = false;
  for (int j = 3; j < 6; ++j) {
    explorer_changed |= Flatten(a.grads[j]) != Flatten(b.grads[j]);
  }
  CHECK(explorer_changed);
}

TEST_CASE("serial, parallel and reference kernels agree bit for bit") {
  RngStream rng(11);
  for (Variant v : {Variant::kTdu, Variant::kBdqn, Variant::kQu, Variant::kQex,
                    Variant::kCts}) {
    TduConfig config = SmallConfig(4, 3);
    config.variant = v;
    config.noise_scale = 0.1;
    EnsembleState e = TrainedLikeEnsemble(config, 5, rng);
    const Batch batch = RandomBatch(config, 5, 16, rng);
    LossOptions serial, parallel;
    serial.execution = Execution::kSerial;
    parallel.execution = Execution::kParallel;
    const EnsembleLossResult s = EnsembleTdLoss(e, batch, config, serial);
    const EnsembleLossResult p = EnsembleTdLoss(e, batch, config, parallel);
    const EnsembleLossResult r = reference::TduLoss(e, batch, config);
    CHECK(s.loss == p.loss);
    CHECK(s.signal == p.signal);
    CHECK(FlattenGrads(s.grads) == FlattenGrads(p.grads));
    CHECK(s.loss == r.loss);
    CHECK(s.signal == r.signal);
    CHECK(FlattenGrads(s.grads) == FlattenGrads(r.grads));

    EnsembleState es = e, ep = e;
    CHECK(EnsembleTrainStep(batch, config, &es, Execution::kSerial) ==
          EnsembleTrainStep(batch, config, &ep, Execution::kParallel));
    CHECK(es == ep);
  }
}

TEST_CASE("variant signals") {
  RngStream rng(12);
  TduConfig config = SmallConfig(3, 2);
  Transition t;
  t.count_bonus = 0.25;
  const std::vector<double> deltas = {1.0, -3.0, 0.5};
  const std::vector<double> qs = {0.0, 2.0, 1.0};
  config.variant = Variant::kTdu;
  CHECK(ExplorationSignal(config, deltas, qs, t) == TduSigma(deltas));
  config.variant = Variant::kQu;
  CHECK(ExplorationSignal(config, deltas, qs, t) == TduSigma(qs));
  config.variant = Variant::kQex;
  CHECK(ExplorationSignal(config, deltas, qs, t) ==
        doctest::Approx(std::abs((1.0 - 3.0 + 0.5) / 3.0)));
  config.variant = Variant::kCts;
  CHECK(ExplorationSignal(config, deltas, qs, t) == 0.25);
  CHECK(HeadUsesSignal(config, 0));
  config.variant = Variant::kBdqn;
  CHECK_FALSE(NeedsSignal(config));
  config.variant = Variant::kQUcb;
  CHECK_FALSE(NeedsSignal(config));

  CHECK(QexReward(0.0) == 0.0);
  CHECK(QexReward(-3.0) == 3.0);
  for (int i = 0; i < 100; ++i) {
    const double d = rng.Normal();
    CHECK(QexReward(d) == (d < 0 ? -d : d));
  }
}

TEST_CASE("qu with beta zero reduces to bootstrapped dqn") {
  RngStream rng(13);
  TduConfig config = SmallConfig(3, 2);
  config.beta = 0.0;
  EnsembleState e = TrainedLikeEnsemble(config, 3, rng);
  const Batch batch = RandomBatch(config, 3, 8, rng);
  config.variant = Variant::kQu;
  const EnsembleLossResult qu = EnsembleTdLoss(e, batch, config);
  config.variant = Variant::kBdqn;
  const EnsembleLossResult bdqn = EnsembleTdLoss(e, batch, config);
  CHECK(qu.loss == bdqn.loss);
  CHECK(FlattenGrads(qu.grads) == FlattenGrads(bdqn.grads));
}

TEST_CASE("count bonus") {
  CountTable counts;
  CHECK(counts.Bonus(3, 1) == doctest::Approx(10.0).epsilon(1e-12));
  double previous = counts.Bonus(3, 1);
  for (int i = 0; i < 100; ++i) {
    counts.Visit(3, 1);
    const double bonus = counts.Bonus(3, 1);
    CHECK(bonus <= previous);
    previous = bonus;
  }
  CHECK(counts.Count(3, 1) == 100);
  CHECK(counts.Bonus(3, 1) == doctest::Approx(1.0 / std::sqrt(100.01)));
  CHECK(counts.Bonus(3, 0) == doctest::Approx(10.0));
  const std::vector<double> obs = {0.0, 0.0, 1.0, 0.0};
  CHECK(StateIndex(obs) == 2);
}

TEST_CASE("ucb bandit head selection") {
  BanditState state(3);
  CHECK(BanditSelectHead(state, 1.0) == 0);
  state.Record(0, 1.0);
  CHECK(BanditSelectHead(state, 1.0) == 1);
  state.Record(1, 1.0);
  CHECK(BanditSelectHead(state, 1.0) == 2);

  BanditState two(2);
  two.Record(0, 1.0);
  two.Record(1, 0.0);
  CHECK(BanditSelectHead(two, 0.0) == 0);
}

TEST_CASE("ucb bandit regret grows logarithmically on bernoulli arms") {
  const std::vector<double> p = {0.3, 0.5, 0.45, 0.2};
  const double best = 0.5;
  BanditState state(4);
  RngStream rng(14);
  double regret = 0.0;
  double regret_at_1e4 = 0.0;
  constexpr int kSteps = 100000;
  for (int n = 1; n <= kSteps; ++n) {
    const int arm = BanditSelectHead(state, std::sqrt(2.0));
    state.Record(arm, rng.Bernoulli(p[arm]) ? 1.0 : 0.0);
    regret += best - p[arm];
    if (n == 10000) regret_at_1e4 = regret;
  }
  // Fit C on the first 10^4 steps; logarithmic growth keeps the later ratio
  // within a small factor, linear growth would multiply it by about 8.
  const double c = regret_at_1e4 / std::log(1e4);
  CHECK(regret <= 2.0 * c * std::log(static_cast<double>(kSteps)));
  CHECK(regret / kSteps < 0.02);
}

TEST_CASE("ucb acting adds the ensemble spread") {
  RngStream rng(15);
  TduConfig config = SmallConfig(2, 1);
  EnsembleState e = InitEnsemble(config, 2, 2, rng);
  for (int h = 0; h < 3; ++h) {
    e.heads[h].online = ZerosLike(e.heads[h].online);
  }
  // Action 0 has values (0, 0, 0); action 1 has (-0.1, -0.1, 1.0).
  e.heads[0].online.layers.back().bias << 0.0, -0.1;
  e.heads[1].online.layers.back().bias << 0.0, -0.1;
  e.heads[2].online.layers.back().bias << 0.0, 1.0;
  const std::vector<double> obs = {1.0, 0.0};
  const std::vector<double> a1 = {-0.1, -0.1, 1.0};
  const double mean1 = (-0.1 - 0.1 + 1.0) / 3.0;
  CHECK(UcbAction(e, obs, 0.0, 0.0) == (mean1 > 0.0 ? 1 : 0));
  CHECK(UcbAction(e, obs, 1.0, 0.0) == 1);
  CHECK(mean1 + TwoPassStd(a1) > 0.0);
}

TEST_CASE("head sampling is uniform over the ensemble") {
  TduConfig config = SmallConfig(10, 10);
  config.hidden_sizes = {2};
  Agent agent(config, 3, 2, RngStream(16));
  constexpr int kDraws = 100000;
  std::vector<int> counts(20, 0);
  int exploiter = 0;
  for (int i = 0; i < kDraws; ++i) {
    agent.BeginEpisode();
    ++counts[agent.active_head()];
    exploiter += agent.active_head() < 10;
  }
  const double p = 1.0 / 20.0;
  const double se = std::sqrt(p * (1 - p) / kDraws);
  for (int c : counts) CHECK(std::abs(static_cast<double>(c) / kDraws - p) < 3.5 * se);
  CHECK(std::abs(exploiter / static_cast<double>(kDraws) - 0.5) <
        3.5 * std::sqrt(0.25 / kDraws));

  TduConfig only = SmallConfig(20, 0);
  only.hidden_sizes = {2};
  Agent exploit_only(only, 3, 2, RngStream(17));
  for (int i = 0; i < 1000; ++i) {
    exploit_only.BeginEpisode();
    CHECK(exploit_only.active_head() < 20);
    CHECK_FALSE(exploit_only.ensemble().is_explorer(exploit_only.active_head()));
  }
}

TEST_CASE("agent waits for min replay, keeps priors fixed and syncs targets") {
  TduConfig config = SmallConfig(2, 2);
  config.min_replay_size = 10;
  config.batch_size = 4;
  const RngStream root(18);
  DeepSeaEnv env(4, false, root.Split("env_map"), root.Split("env_dynamics"));
  Agent agent(config, env.observation_size(), 2, root.Split("agent"));
  const EnsembleState initial = agent.ensemble();

  int updates = 0;
  std::vector<double> obs = env.Reset();
  agent.BeginEpisode();
  for (int step = 0; step < 9 + 4 * 3; ++step) {
    if (env.episode_done()) {
      obs = env.Reset();
      agent.BeginEpisode();
    }
    const int action = agent.Act(obs);
    StepResult s = env.Step(action);
    const bool updated = agent.Observe(obs, action, s);
    obs = s.observation;
    if (step < 9) {
      CHECK_FALSE(updated);
      for (int h = 0; h < 4; ++h) {
        CHECK(agent.ensemble().heads[h].online == initial.heads[h].online);
      }
      continue;
    }
    REQUIRE(updated);
    ++updates;
    for (int h = 0; h < 4; ++h) {
      const Head& head = agent.ensemble().heads[h];
      CHECK(head.prior == initial.heads[h].prior);
      CHECK(head.step == updates);
      if (updates % 4 == 0) {
        CHECK(head.target == head.online);
        CHECK(head.prior_target == head.prior);
      } else {
        CHECK_FALSE(head.target == head.online);
      }
      if (updates < 4) CHECK(head.target == initial.heads[h].target);
    }
  }
  CHECK(agent.sgd_steps() == 12);
}

TEST_CASE("beta zero tdu agent matches the reference bootstrapped dqn") {
  TduConfig config = SmallConfig(3, 2);
  config.beta = 0.0;
  config.min_replay_size = 8;
  config.mask_probability = 0.5;
  const RngStream root(19);
  DeepSeaEnv env_a(5, false, root.Split("env_map"), root.Split("env_dynamics"));
  DeepSeaEnv env_b(5, false, root.Split("env_map"), root.Split("env_dynamics"));
  Agent agent(config, 25, 2, root.Split("agent"), Execution::kSerial);
  reference::BootstrappedDqn ref(config, 25, 2, root.Split("agent"));
  for (int episode = 0; episode < 40; ++episode) {
    agent.BeginEpisode();
    ref.BeginEpisode();
    std::vector<double> oa = env_a.Reset(), ob = env_b.Reset();
    while (!env_a.episode_done()) {
      const int aa = agent.Act(oa), ab = ref.Act(ob);
      REQUIRE(aa == ab);
      StepResult sa = env_a.Step(aa), sb = env_b.Step(ab);
      agent.Observe(oa, aa, sa);
      ref.Observe(ob, ab, sb);
      oa = sa.observation;
      ob = sb.observation;
    }
  }
  CHECK(agent.ensemble() == ref.ensemble());
}

TEST_CASE("checkpoint round trip is bit exact") {
  RngStream rng(20);
  TduConfig config = SmallConfig(2, 1);
  EnsembleState e = TrainedLikeEnsemble(config, 4, rng);
  const Batch batch = RandomBatch(config, 4, 8, rng);
  EnsembleTrainStep(batch, config, &e);
  e.active_head = 2;
  std::stringstream buffer;
  WriteCheckpoint(e, buffer);
  const EnsembleState loaded = ReadCheckpoint(buffer);
  CHECK(loaded == e);

  std::string bytes = buffer.str();
  std::stringstream truncated(bytes.substr(0, bytes.size() / 2));
  CHECK_THROWS_AS(ReadCheckpoint(truncated), std::runtime_error);
  bytes[0] ^= 0x5a;
  std::stringstream corrupt(bytes);
  CHECK_THROWS_AS(ReadCheckpoint(corrupt), std::runtime_error);
}

TEST_CASE("agents are deterministic given the seed") {
  TduConfig config = SmallConfig(2, 2);
  config.min_replay_size = 16;
  auto run = [&](uint64_t seed) {
    const RngStream root(seed);
    DeepSeaEnv env(5, true, root.Split("env_map"), root.Split("env_dynamics"));
    Agent agent(config, 25, 2, root.Split("agent"));
    std::vector<double> returns;
    for (int e = 0; e < 30; ++e) returns.push_back(RunEpisode(agent, env).episode_return);
    return std::make_pair(returns, agent.ensemble());
  };
  const auto a = run(21), b = run(21);
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);
}

TEST_CASE("tdu solves deep sea N=6 within 500 episodes") {
  const TduConfig config;  // defaults: K = N = 10, beta 1, lambda 3
  const RngStream root(1);
  DeepSeaEnv env(6, false, root.Split("env_map"), root.Split("env_dynamics"));
  Agent agent(config, env.observation_size(), 2, root.Split("agent"));
  double cumulative_regret = 0.0;
  for (int e = 0; e < 500; ++e) {
    cumulative_regret += env.OptimalReturn() - RunEpisode(agent, env).episode_return;
  }
  CHECK(cumulative_regret / 500.0 < 0.9);
  CHECK(EvaluateExploit(agent, env) == doctest::Approx(env.OptimalReturn()));
}

}  // namespace
}  // namespace tdulab
