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

#include "regimes/hmm_kernels.hpp"

#include <cmath>
#include <limits>

#include "regimes/error.hpp"

namespace regimes::kernels {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double lse(const Eigen::VectorXd& v) {
  return log_sum_exp(std::span<const double>(v.data(), std::size_t(v.size())));
}

void check_shapes(const Eigen::MatrixXd& le, const Eigen::VectorXd& li, const Eigen::MatrixXd& lt) {
  if (le.rows() == 0) throw Error(ErrorCode::EmptySeries, "no time steps");
  if (le.cols() != li.size() || lt.rows() != li.size() || lt.cols() != li.size())
    throw Error(ErrorCode::InvalidArgument, "inconsistent state counts");
}

}  // namespace

ForwardResult forward(const Eigen::MatrixXd& log_emission, const Eigen::VectorXd& log_initial,
                      const Eigen::MatrixXd& log_transition) {
  check_shapes(log_emission, log_initial, log_transition);
  const Eigen::Index T = log_emission.rows(), K = log_emission.cols();
  ForwardResult r;
  r.log_alpha.resize(T, K);
  r.log_alpha.row(0) = (log_initial + log_emission.row(0).transpose()).transpose();
  Eigen::VectorXd scratch(K);
  for (Eigen::Index t = 1; t < T; ++t) {
    for (Eigen::Index k = 0; k < K; ++k) {
      for (Eigen::Index j = 0; j < K; ++j) scratch[j] = r.log_alpha(t - 1, j) + log_transition(j, k);
      r.log_alpha(t, k) = lse(scratch) + log_emission(t, k);
    }
  }
  r.log_likelihood = lse(r.log_alpha.row(T - 1).transpose());
  if (!std::isfinite(r.log_likelihood))
    throw Error(ErrorCode::NumericalUnderflow, "forward recursion lost all probability mass");
  return r;
}

Eigen::MatrixXd backward(const Eigen::MatrixXd& log_emission,
                         const Eigen::MatrixXd& log_transition) {
  const Eigen::Index T = log_emission.rows(), K = log_emission.cols();
  Eigen::MatrixXd log_beta = Eigen::MatrixXd::Zero(T, K);
  Eigen::VectorXd scratch(K);
  for (Eigen::Index t = T - 2; t >= 0; --t) {
    for (Eigen::Index j = 0; j < K; ++j) {
      for (Eigen::Index k = 0; k < K; ++k)
        scratch[k] = log_transition(j, k) + log_emission(t + 1, k) + log_beta(t + 1, k);
      log_beta(t, j) = lse(scratch);
    }
  }
  return log_beta;
}

Posteriors smooth(const Eigen::MatrixXd& log_emission, const Eigen::VectorXd& log_initial,
                  const Eigen::MatrixXd& log_transition) {
  const auto fw = forward(log_emission, log_initial, log_transition);
  const auto log_beta = backward(log_emission, log_transition);
  const Eigen::Index T = log_emission.rows(), K = log_emission.cols();
  Posteriors p;
  p.log_likelihood = fw.log_likelihood;
  p.gamma = (fw.log_alpha + log_beta).array() - fw.log_likelihood;
  p.gamma = p.gamma.array().exp();
  // Renormalize rows against accumulated rounding.
  for (Eigen::Index t = 0; t < T; ++t) p.gamma.row(t) /= p.gamma.row(t).sum();
  p.xi_sum = Eigen::MatrixXd::Zero(K, K);
  for (Eigen::Index t = 0; t + 1 < T; ++t)
    for (Eigen::Index j = 0; j < K; ++j)
      for (Eigen::Index k = 0; k < K; ++k)
        p.xi_sum(j, k) += std::exp(fw.log_alpha(t, j) + log_transition(j, k) +
                                   log_emission(t + 1, k) + log_beta(t + 1, k) -
                                   fw.log_likelihood);
  return p;
}

ViterbiResult viterbi(const Eigen::MatrixXd& log_emission, const Eigen::VectorXd& log_initial,
                      const Eigen::MatrixXd& log_transition) {
  check_shapes(log_emission, log_initial, log_transition);
  const Eigen::Index T = log_emission.rows(), K = log_emission.cols();
  Eigen::MatrixXd delta(T, K);
  Eigen::MatrixXi back(T, K);
  delta.row(0) = (log_initial + log_emission.row(0).transpose()).transpose();
  for (Eigen::Index t = 1; t < T; ++t) {
    for (Eigen::Index k = 0; k < K; ++k) {
      double best = kNegInf;
      int arg = 0;
      for (Eigen::Index j = 0; j < K; ++j) {
        const double v = delta(t - 1, j) + log_transition(j, k);
        if (v > best) {
          best = v;
          arg = int(j);
        }
      }
      delta(t, k) = best + log_emission(t, k);
      back(t, k) = arg;
    }
  }
  ViterbiResult r;
  r.path.assign(std::size_t(T), 0);
  double best = kNegInf;
  int arg = 0;
  for (Eigen::Index k = 0; k < K; ++k)
    if (delta(T - 1, k) > best) {
      best = delta(T - 1, k);
      arg = int(k);
    }
  if (!std::isfinite(best))
    throw Error(ErrorCode::NumericalUnderflow, "no state path has positive probability");
  r.log_prob = best;
  r.path[std::size_t(T - 1)] = arg;
  for (Eigen::Index t = T - 1; t > 0; --t)
    r.path[std::size_t(t - 1)] = back(t, r.path[std::size_t(t)]);
  return r;
}

std::vector<int> sample_path(const Eigen::MatrixXd& log_emission,
                             const Eigen::VectorXd& log_initial,
                             const Eigen::MatrixXd& log_transition, Rng& rng) {
  const auto fw = forward(log_emission, log_initial, log_transition);
  const Eigen::Index T = log_emission.rows(), K = log_emission.cols();
  std::vector<int> z(static_cast<std::size_t>(T));
  std::vector<double> w(static_cast<std::size_t>(K));
  for (Eigen::Index k = 0; k < K; ++k) w[std::size_t(k)] = fw.log_alpha(T - 1, k);
  z[std::size_t(T - 1)] = int(rng.categorical_log(w));
  for (Eigen::Index t = T - 2; t >= 0; --t) {
    const int next = z[std::size_t(t + 1)];
    for (Eigen::Index k = 0; k < K; ++k)
      w[std::size_t(k)] = fw.log_alpha(t, k) + log_transition(k, next);
    z[std::size_t(t)] = int(rng.categorical_log(w));
  }
  return z;
}

double path_log_prob(const Eigen::MatrixXd& log_emission, const Eigen::VectorXd& log_initial,
                     const Eigen::MatrixXd& log_transition, const std::vector<int>& path) {
  double lp = log_initial[path[0]] + log_emission(0, path[0]);
  for (std::size_t t = 1; t < path.size(); ++t)
    lp += log_transition(path[t - 1], path[t]) + log_emission(Eigen::Index(t), path[t]);
  return lp;
}

}  // namespace regimes::kernels
