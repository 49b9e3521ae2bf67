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
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "regimes/core.hpp"
#include "regimes/gaussian_hmm.hpp"
#include "regimes/niw.hpp"
#include "regimes/random.hpp"

namespace regimes {

struct StickyHypers {
  double alpha = 1.0;  // HDP concentration of each transition row
  double kappa = 0.0;  // extra self-transition mass
  double gamma = 1.0;  // concentration of the global weights

  double rho() const noexcept { return alpha + kappa > 0.0 ? kappa / (alpha + kappa) : 0.0; }
};

// Gamma(shape, rate) priors on (alpha + kappa) and gamma, Beta(a, b) on
// rho = kappa / (alpha + kappa).
struct HyperPriors {
  double concentration_shape = 1.0;
  double concentration_rate = 0.01;
  double gamma_shape = 1.0;
  double gamma_rate = 0.01;
  double rho_a = 10.0;
  double rho_b = 1.0;

  StickyHypers prior_mean() const;
};

struct StickyConfig {
  int k_max = 8;
  int burn_in = 500;
  int n_samples = 500;
  int thin = 1;
  std::uint64_t seed = 0;
  bool sample_hypers = true;
  std::optional<StickyHypers> fixed_hypers;
  HyperPriors hyper_priors;

  void validate() const;
};

// Full state of one Gibbs chain over the truncated model.
struct SamplerState {
  ChannelSet channels;
  std::vector<int> z;
  Eigen::VectorXd beta;        // global weights, length K_max
  Eigen::VectorXd initial;     // distribution of z_1
  Eigen::MatrixXd pi;          // K_max x K_max transition rows
  std::vector<std::vector<GaussianEmission>> emissions;  // [state][channel]
  StickyHypers hypers;
  Eigen::MatrixXi tables;      // CRF table counts m_jk
  Eigen::VectorXi overrides;   // sticky override counts w_j

  int k_max() const noexcept { return int(beta.size()); }
  // Throws InvalidArgument when a simplex or count invariant is broken.
  void validate() const;
};

struct TableCounts {
  Eigen::MatrixXi tables;
  Eigen::VectorXi overrides;
};

Eigen::MatrixXi transition_counts(const std::vector<int>& z, int k_max);

// Tables after removing the sticky overrides from the diagonal.
Eigen::MatrixXi override_corrected(const Eigen::MatrixXi& tables, const Eigen::VectorXi& overrides);

// Emission log-likelihoods (T x K_max) under the state's parameters.
Eigen::MatrixXd emission_matrix(const SamplerState& state, const ConversationSeries& series);

SamplerState init_sampler(const ConversationSeries& series, const StickyConfig& cfg,
                          const NiwPrior& prior, Rng& rng);

std::vector<int> sample_state_sequence(const SamplerState& state, const ConversationSeries& series,
                                       Rng& rng);
TableCounts sample_tables(const SamplerState& state, Rng& rng);
Eigen::VectorXd sample_beta(const SamplerState& state, Rng& rng);
Eigen::MatrixXd sample_transition_rows(const SamplerState& state, Rng& rng);
Eigen::VectorXd sample_initial(const SamplerState& state, Rng& rng);
std::vector<std::vector<GaussianEmission>> sample_emissions(const SamplerState& state,
                                                            const ConversationSeries& series,
                                                            const NiwPrior& prior, Rng& rng);
StickyHypers sample_hypers(const SamplerState& state, const StickyConfig& cfg, Rng& rng);

// log p(X, z | initial, pi, emissions)
double joint_loglik(const SamplerState& state, const ConversationSeries& series);

// One full sweep in the fixed order z -> tables -> beta -> pi -> emissions -> hypers.
void gibbs_sweep(SamplerState& state, const ConversationSeries& series, const StickyConfig& cfg,
                 const NiwPrior& prior, Rng& rng);

struct StickyPosterior {
  ChannelSet channels;
  std::vector<SamplerState> samples;  // retained, thinned
  Eigen::VectorXd initial;
  Eigen::VectorXd beta;
  Eigen::MatrixXd transitions;
  std::vector<std::vector<GaussianEmission>> emissions;
  StickyHypers mean_hypers;
  std::vector<bool> support;  // state occupied in at least one retained sample
  LabelSequence labels;       // Viterbi path under the posterior means
  double path_log_prob = 0.0;
  int effective_k = 0;
  std::vector<double> loglik_trace;  // joint log-likelihood after every sweep

  int k_max() const noexcept { return int(initial.size()); }
  // Posterior means as an (untied) HmmModel.
  HmmModel mean_model() const;
};

// Runs the chain and reports the posterior-mean Viterbi path. Regimes are
// renumbered so that reported labels ascend in mean valence across modalities.
StickyPosterior fit_sticky(const ConversationSeries& series, const StickyConfig& cfg,
                           const NiwPrior& prior);

// Viterbi under the posterior means, restricted to supported states.
Decoding decode(const StickyPosterior& posterior, const ConversationSeries& series);

}  // namespace regimes
