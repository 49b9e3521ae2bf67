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

#include "regimes/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace regimes {

Rng seeded_rng(std::uint64_t seed) { return Rng(seed); }

double Rng::uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

double Rng::uniform_open() {
  double u;
  do {
    u = uniform();
  } while (u <= 0.0);
  return u;
}

double Rng::normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

double Rng::gamma(double shape, double rate) {
  if (shape >= 1.0) return std::gamma_distribution<double>(shape, 1.0)(engine_) / rate;
  return std::exp(log_gamma_draw(shape)) / rate;
}

double Rng::log_gamma_draw(double shape) {
  if (shape >= 1.0) return std::log(std::gamma_distribution<double>(shape, 1.0)(engine_));
  // Gamma(a) = Gamma(a + 1) * U^(1/a)
  const double g = std::gamma_distribution<double>(shape + 1.0, 1.0)(engine_);
  return std::log(g) + std::log(uniform_open()) / shape;
}

double Rng::beta(double a, double b) {
  const double la = log_gamma_draw(a);
  const double lb = log_gamma_draw(b);
  const double m = std::max(la, lb);
  const double ea = std::exp(la - m), eb = std::exp(lb - m);
  return ea / (ea + eb);
}

bool Rng::bernoulli(double p) { return uniform() < p; }

long Rng::binomial(long n, double p) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  return std::binomial_distribution<long>(n, p)(engine_);
}

double Rng::chi_squared(double dof) { return 2.0 * gamma(0.5 * dof, 1.0); }

std::size_t Rng::uniform_index(std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
}

Eigen::VectorXd Rng::dirichlet(const Eigen::VectorXd& concentration) {
  const Eigen::Index k = concentration.size();
  Eigen::VectorXd logs(k);
  for (Eigen::Index i = 0; i < k; ++i) logs[i] = log_gamma_draw(concentration[i]);
  const double m = logs.maxCoeff();
  Eigen::VectorXd out = (logs.array() - m).exp();
  out /= out.sum();
  return out;
}

std::size_t Rng::categorical_log(std::span<const double> log_weights) {
  const double m = *std::max_element(log_weights.begin(), log_weights.end());
  std::vector<double> w(log_weights.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_weights[i] - m);
  return categorical(w);
}

std::size_t Rng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  // Rounding left u at the tail: return the last positive-weight index.
  for (std::size_t i = weights.size(); i-- > 0;)
    if (weights[i] > 0.0) return i;
  return weights.size() - 1;
}

Eigen::MatrixXd Rng::wishart(const Eigen::MatrixXd& scale, double dof) {
  const Eigen::Index d = scale.rows();
  const Eigen::MatrixXd chol = scale.llt().matrixL();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    a(i, i) = std::sqrt(chi_squared(dof - double(i)));
    for (Eigen::Index j = 0; j < i; ++j) a(i, j) = normal();
  }
  const Eigen::MatrixXd la = chol * a;
  return la * la.transpose();
}

Eigen::MatrixXd Rng::inverse_wishart(const Eigen::MatrixXd& psi, double dof) {
  const Eigen::MatrixXd psi_inv = psi.inverse();
  const Eigen::MatrixXd sym = 0.5 * (psi_inv + psi_inv.transpose());
  Eigen::MatrixXd w = wishart(sym, dof);
  Eigen::MatrixXd inv = w.inverse();
  return 0.5 * (inv + inv.transpose());
}

double log_sum_exp(std::span<const double> v) noexcept {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace regimes
