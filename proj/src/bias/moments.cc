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

#include "tdulab/bias/moments.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace tdulab {
namespace {

void CheckProbabilities(const std::vector<double>& p, const char* what) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument(std::string(what) +
                                  ": probability outside [0, 1]");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument(std::string(what) + ": probabilities sum to " +
                                std::to_string(sum));
  }
}

// Weighted mean and variance of x_i under p_i, variance by a second pass.
struct Weighted {
  double mean = 0.0;
  double variance = 0.0;
  double second = 0.0;
};

Weighted WeightedMoments(const std::vector<double>& x,
                         const std::vector<double>& p) {
  Weighted out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.mean += p[i] * x[i];
    out.second += p[i] * x[i] * x[i];
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - out.mean;
    out.variance += p[i] * d * d;
  }
  return out;
}

double Dot(const std::vector<double>& a, const double* b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

// u' Sigma v for a dense row-major covariance.
double QuadraticForm(const std::vector<double>& cov, const double* u,
                     const double* v, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += cov[static_cast<std::size_t>(i) * n + j] * v[j];
    s += u[i] * row;
  }
  return s;
}

}  // namespace

QTable ParamPosterior::Values(const std::vector<double>& w) const {
  QTable q(num_pairs);
  for (int p = 0; p < num_pairs; ++p) {
    q[p] = Dot(w, &features[static_cast<std::size_t>(p) * feature_dim],
               feature_dim);
  }
  return q;
}

void ParamPosterior::Validate(int belief_size) const {
  if (num_pairs <= 0 || feature_dim <= 0) {
    throw std::invalid_argument("ParamPosterior: empty feature map");
  }
  if (features.size() != static_cast<std::size_t>(num_pairs) * feature_dim) {
    throw std::invalid_argument("ParamPosterior: feature table size mismatch");
  }
  for (double f : features) {
    if (!std::isfinite(f)) {
      throw std::invalid_argument("ParamPosterior: non-finite feature");
    }
  }
  if (gaussian) {
    if (!weights.empty() || paired()) {
      throw std::invalid_argument(
          "ParamPosterior: Gaussian posterior cannot hold members or pairing");
    }
    if (mean.size() != static_cast<std::size_t>(feature_dim) ||
        covariance.size() !=
            static_cast<std::size_t>(feature_dim) * feature_dim) {
      throw std::invalid_argument("ParamPosterior: Gaussian moment shapes");
    }
    for (int i = 0; i < feature_dim; ++i) {
      if (covariance[static_cast<std::size_t>(i) * feature_dim + i] < 0.0) {
        throw std::invalid_argument("ParamPosterior: negative variance");
      }
      for (int j = 0; j < i; ++j) {
        if (covariance[static_cast<std::size_t>(i) * feature_dim + j] !=
            covariance[static_cast<std::size_t>(j) * feature_dim + i]) {
          throw std::invalid_argument(
              "ParamPosterior: covariance is not symmetric");
        }
      }
    }
    return;
  }
  if (weights.empty()) {
    throw std::invalid_argument("ParamPosterior: no members");
  }
  if (probabilities.size() != weights.size()) {
    throw std::invalid_argument("ParamPosterior: probability count mismatch");
  }
  CheckProbabilities(probabilities, "ParamPosterior");
  for (const auto& w : weights) {
    if (w.size() != static_cast<std::size_t>(feature_dim)) {
      throw std::invalid_argument("ParamPosterior: weight dimension mismatch");
    }
  }
  if (paired()) {
    if (paired_member.size() != weights.size()) {
      throw std::invalid_argument("ParamPosterior: pairing size mismatch");
    }
    for (int m : paired_member) {
      if (m < 0 || m >= belief_size) {
        throw std::invalid_argument("ParamPosterior: pairing index " +
                                    std::to_string(m) + " out of range");
      }
    }
  }
}

ParamPosterior TabularPosterior(const std::vector<QTable>& q_tables,
                                std::vector<double> probabilities) {
  if (q_tables.empty()) {
    throw std::invalid_argument("TabularPosterior: no Q tables");
  }
  ParamPosterior post;
  post.structure = PosteriorStructure::kFull;
  post.num_pairs = static_cast<int>(q_tables.front().size());
  post.feature_dim = post.num_pairs;
  post.features.assign(
      static_cast<std::size_t>(post.num_pairs) * post.num_pairs, 0.0);
  for (int p = 0; p < post.num_pairs; ++p) {
    post.features[static_cast<std::size_t>(p) * post.num_pairs + p] = 1.0;
  }
  post.weights = q_tables;
  post.probabilities = std::move(probabilities);
  return post;
}

ParamPosterior FinalLayerPosterior(int num_pairs, int feature_dim,
                                   std::vector<double> features,
                                   std::vector<std::vector<double>> weights,
                                   std::vector<double> probabilities) {
  ParamPosterior post;
  post.structure = PosteriorStructure::kFinalLayerOnly;
  post.num_pairs = num_pairs;
  post.feature_dim = feature_dim;
  post.features = std::move(features);
  post.weights = std::move(weights);
  post.probabilities = std::move(probabilities);
  return post;
}

ParamPosterior GaussianLinearPosterior(int num_pairs, int feature_dim,
                                       std::vector<double> features,
                                       std::vector<double> mean,
                                       std::vector<double> covariance) {
  ParamPosterior post;
  post.structure = PosteriorStructure::kFinalLayerOnly;
  post.num_pairs = num_pairs;
  post.feature_dim = feature_dim;
  post.features = std::move(features);
  post.gaussian = true;
  post.mean = std::move(mean);
  post.covariance = std::move(covariance);
  return post;
}

std::vector<std::vector<double>> SampleWeights(const ParamPosterior& posterior,
                                               int count, RngStream& rng) {
  posterior.Validate(std::numeric_limits<int>::max());
  std::vector<std::vector<double>> out;
  out.reserve(count);
  if (!posterior.gaussian) {
    for (int k = 0; k < count; ++k) {
      const double u = rng.Uniform();
      double cumulative = 0.0;
      std::size_t pick = posterior.weights.size() - 1;
      for (std::size_t i = 0; i < posterior.weights.size(); ++i) {
        cumulative += posterior.probabilities[i];
        if (u < cumulative) {
          pick = i;
          break;
        }
      }
      out.push_back(posterior.weights[pick]);
    }
    return out;
  }
  const int n = posterior.feature_dim;
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>>
      cov(posterior.covariance.data(), n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd root_values =
      eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd root =
      eig.eigenvectors() * root_values.asDiagonal() *
      eig.eigenvectors().transpose();
  Eigen::VectorXd z(n);
  for (int k = 0; k < count; ++k) {
    for (int i = 0; i < n; ++i) z[i] = rng.Normal();
    const Eigen::VectorXd w = root * z;
    std::vector<double> sample(n);
    for (int i = 0; i < n; ++i) sample[i] = posterior.mean[i] + w[i];
    out.push_back(std::move(sample));
  }
  return out;
}

BeliefMomentTables BeliefMoments(const MdpBelief& belief) {
  belief.Validate();
  BeliefMomentTables out;
  for (const TabularMdp& m : belief.mdps) out.q.push_back(ExactQ(m));
  const int pairs = belief.mdps.front().num_pairs();
  std::vector<double> column(belief.size());
  for (int p = 0; p < pairs; ++p) {
    for (std::size_t i = 0; i < belief.size(); ++i) column[i] = out.q[i][p];
    const Weighted w = WeightedMoments(column, belief.probabilities);
    out.mean.push_back(w.mean);
    out.variance.push_back(w.variance);
    out.second.push_back(w.second);
  }
  return out;
}

std::vector<TransitionKey> EnumerateTransitions(const MdpBelief& belief) {
  const TabularMdp mix = belief.Mixture();
  std::vector<TransitionKey> out;
  for (int s = 0; s < mix.num_states; ++s) {
    for (int a = 0; a < mix.num_actions; ++a) {
      for (int t = 0; t < mix.num_states; ++t) {
        if (mix.P(s, a, t) > 0.0) {
          out.push_back({s, a, t, mix.policy[t], mix.R(s, a)});
        }
      }
    }
  }
  return out;
}

PosteriorMomentTables PosteriorMoments(const ParamPosterior& posterior,
                                       const MdpBelief& belief) {
  belief.Validate();
  posterior.Validate(static_cast<int>(belief.size()));
  const TabularMdp mix = belief.Mixture();
  if (posterior.num_pairs != mix.num_pairs()) {
    throw std::invalid_argument(
        "PosteriorMoments: posterior and belief disagree on the pair count");
  }
  const double gamma = mix.discount;
  PosteriorMomentTables out;
  out.transitions = EnumerateTransitions(belief);
  const int pairs = posterior.num_pairs;

  if (posterior.gaussian) {
    const int n = posterior.feature_dim;
    // psi(s, a) = sum_s' P(s'|s, a) phi(s', pi(s')).
    std::vector<double> psi(static_cast<std::size_t>(pairs) * n, 0.0);
    for (int s = 0; s < mix.num_states; ++s) {
      for (int a = 0; a < mix.num_actions; ++a) {
        double* row = &psi[static_cast<std::size_t>(mix.pair(s, a)) * n];
        for (int t = 0; t < mix.num_states; ++t) {
          const double p = mix.P(s, a, t);
          if (p == 0.0) continue;
          const int next = mix.pair(t, mix.policy[t]);
          for (int i = 0; i < n; ++i) row[i] += p * posterior.Feature(next, i);
        }
      }
    }
    for (int p = 0; p < pairs; ++p) {
      const double* phi = &posterior.features[static_cast<std::size_t>(p) * n];
      const double* ps = &psi[static_cast<std::size_t>(p) * n];
      const double m = Dot(posterior.mean, phi, n);
      const double v = QuadraticForm(posterior.covariance, phi, phi, n);
      out.mean.push_back(m);
      out.variance.push_back(v);
      out.second.push_back(v + m * m);
      out.backup_mean.push_back(mix.rewards[p] +
                                gamma * Dot(posterior.mean, ps, n));
      out.backup_variance.push_back(gamma * gamma *
                                    QuadraticForm(posterior.covariance, ps,
                                                  ps, n));
    }
    std::vector<double> diff(n);
    for (const TransitionKey& k : out.transitions) {
      const int here = mix.pair(k.state, k.action);
      const int next = mix.pair(k.next_state, k.next_action);
      const double* phi = &posterior.features[static_cast<std::size_t>(here) * n];
      const double* phn = &posterior.features[static_cast<std::size_t>(next) * n];
      for (int i = 0; i < n; ++i) diff[i] = gamma * phn[i] - phi[i];
      DeltaMoments d;
      d.mean = k.reward + Dot(posterior.mean, diff.data(), n);
      d.variance = QuadraticForm(posterior.covariance, diff.data(),
                                 diff.data(), n);
      d.cross = QuadraticForm(posterior.covariance, phn, phi, n) +
                Dot(posterior.mean, phn, n) * Dot(posterior.mean, phi, n);
      out.deltas.push_back(d);
    }
    return out;
  }

  const std::size_t members = posterior.weights.size();
  std::vector<QTable> q(members), backup(members);
  for (std::size_t i = 0; i < members; ++i) {
    q[i] = posterior.Values(posterior.weights[i]);
    const TabularMdp& model = posterior.paired()
                                  ? belief.mdps[posterior.paired_member[i]]
                                  : mix;
    backup[i] = BellmanBackup(model, q[i]);
  }
  std::vector<double> column(members);
  for (int p = 0; p < pairs; ++p) {
    for (std::size_t i = 0; i < members; ++i) column[i] = q[i][p];
    const Weighted w = WeightedMoments(column, posterior.probabilities);
    out.mean.push_back(w.mean);
    out.variance.push_back(w.variance);
    out.second.push_back(w.second);
    for (std::size_t i = 0; i < members; ++i) column[i] = backup[i][p];
    const Weighted b = WeightedMoments(column, posterior.probabilities);
    out.backup_mean.push_back(b.mean);
    out.backup_variance.push_back(b.variance);
  }
  for (const TransitionKey& k : out.transitions) {
    const int here = mix.pair(k.state, k.action);
    const int next = mix.pair(k.next_state, k.next_action);
    DeltaMoments d;
    for (std::size_t i = 0; i < members; ++i) {
      column[i] = gamma * q[i][next] - q[i][here];
      d.cross += posterior.probabilities[i] * q[i][next] * q[i][here];
    }
    const Weighted w = WeightedMoments(column, posterior.probabilities);
    d.mean = k.reward + w.mean;
    d.variance = w.variance;
    out.deltas.push_back(d);
  }
  return out;
}

std::vector<DeltaMoments> BeliefDeltaMoments(
    const MdpBelief& belief, const BeliefMomentTables& moments,
    const std::vector<TransitionKey>& transitions) {
  const TabularMdp& first = belief.mdps.front();
  const double gamma = first.discount;
  std::vector<DeltaMoments> out;
  std::vector<double> column(belief.size());
  for (const TransitionKey& k : transitions) {
    const int here = first.pair(k.state, k.action);
    const int next = first.pair(k.next_state, k.next_action);
    DeltaMoments d;
    for (std::size_t i = 0; i < belief.size(); ++i) {
      column[i] = gamma * moments.q[i][next] - moments.q[i][here];
      d.cross += belief.probabilities[i] * moments.q[i][next] *
                 moments.q[i][here];
    }
    const Weighted w = WeightedMoments(column, belief.probabilities);
    d.mean = k.reward + w.mean;
    d.variance = w.variance;
    out.push_back(d);
  }
  return out;
}

}  // namespace tdulab
