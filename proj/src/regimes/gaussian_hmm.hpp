/*
 Copyright 2026 The regimes Authors.
 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      http://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "regimes/core.hpp"
#include "regimes/random.hpp"

namespace regimes {

// Gaussian HMM with factorized per-modality emissions. emissions[k][c] is the
// emission of state k for the c-th channel of `channels` in canonical order.
struct HmmModel {
  ChannelSet channels;
  Eigen::VectorXd initial;
  Eigen::MatrixXd transitions;
  std::vector<std::vector<GaussianEmission>> emissions;
  bool tied_covariance = true;

  int num_states() const noexcept { return int(initial.size()); }
  // Throws InvalidArgument when a probability vector or the emission table is malformed.
  void validate() const;
};

struct EmConfig {
  int num_states = 4;
  int max_iters = 200;
  double tol = 1e-6;  // relative log-likelihood improvement
  int n_restarts = 5;
  std::uint64_t seed = 0;
  bool tied_covariance = true;
  double init_self_mass = 0.8;
};

// One EM run from a fixed starting point.
struct EmRun {
  HmmModel model;
  double log_likelihood = 0.0;
  std::vector<double> trace;       // log-likelihood before each M-step
  std::vector<int> reseeded_at;    // iterations where a collapsed state was re-seeded
  int iterations = 0;
};

struct EmResult {
  HmmModel model;
  double log_likelihood = 0.0;
  std::vector<EmRun> runs;
  int best_run = 0;
};

struct Decoding {
  LabelSequence labels;
  double path_log_prob = 0.0;
};

// sum over modalities of log N(x^(m); mu_k^(m), Sigma_k^(m))
double emission_loglik(const HmmModel& model, const Observation& obs, int state);

// T x K matrix of emission_loglik values.
Eigen::MatrixXd emission_matrix(const HmmModel& model, const ConversationSeries& series);

double forward_loglik(const HmmModel& model, const ConversationSeries& series);

Decoding viterbi(const HmmModel& model, const ConversationSeries& series);

// Baum-Welch with best-of-restarts selection. More than one series fits a
// pooled model; each sequence restarts from the initial distribution.
EmResult fit_em(std::span<const ConversationSeries> series, const EmConfig& cfg);
EmResult fit_em(const ConversationSeries& series, const EmConfig& cfg);

// k-means++ initialized model (self-biased transitions, uniform initial).
HmmModel initial_model(std::span<const ConversationSeries> series, const EmConfig& cfg, Rng& rng);

EmRun run_em(std::span<const ConversationSeries> series, HmmModel start, const EmConfig& cfg);

// K+1-state model with the same likelihood: state `k` is duplicated and its
// incoming mass split evenly between the copies.
HmmModel split_state(const HmmModel& model, int k);

// The model with states reordered: new state i is old state order[i].
HmmModel permute_states(const HmmModel& model, const std::vector<int>& order);

}  // namespace regimes
