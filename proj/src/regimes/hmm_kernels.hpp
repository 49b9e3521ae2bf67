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

#include <vector>

#include <Eigen/Dense>

#include "regimes/random.hpp"

// Log-domain recursions shared by the Gaussian HMM and the sticky sampler.
// Every routine takes a T x K matrix of per-step emission log-likelihoods.
namespace regimes::kernels {

struct ForwardResult {
  Eigen::MatrixXd log_alpha;  // T x K, unnormalized log joint p(x_1..t, z_t)
  double log_likelihood = 0.0;
};

ForwardResult forward(const Eigen::MatrixXd& log_emission, const Eigen::VectorXd& log_initial,
                      const Eigen::MatrixXd& log_transition);

// log p(x_{t+1..T} | z_t); last row is zero.
Eigen::MatrixXd backward(const Eigen::MatrixXd& log_emission,
                         const Eigen::MatrixXd& log_transition);

struct Posteriors {
  Eigen::MatrixXd gamma;       // T x K state marginals
  Eigen::MatrixXd xi_sum;      // K x K expected transition counts
  double log_likelihood = 0.0;
};

Posteriors smooth(const Eigen::MatrixXd& log_emission, const Eigen::VectorXd& log_initial,
                  const Eigen::MatrixXd& log_transition);

struct ViterbiResult {
  std::vector<int> path;
  double log_prob = 0.0;
};

// Ties resolve toward the lower state index.
ViterbiResult viterbi(const Eigen::MatrixXd& log_emission, const Eigen::VectorXd& log_initial,
                      const Eigen::MatrixXd& log_transition);

// Forward filtering, backward sampling: one exact draw of z_{1:T}.
std::vector<int> sample_path(const Eigen::MatrixXd& log_emission,
                             const Eigen::VectorXd& log_initial,
                             const Eigen::MatrixXd& log_transition, Rng& rng);

// log p(x, z) for a fixed path.
double path_log_prob(const Eigen::MatrixXd& log_emission, const Eigen::VectorXd& log_initial,
                     const Eigen::MatrixXd& log_transition, const std::vector<int>& path);

}  // namespace regimes::kernels
