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
#include <random>
#include <span>

#include <Eigen/Dense>

namespace regimes {

// Single-owner deterministic random source. Every stochastic routine in the
// library draws from one of these; child streams are derived from
// (seed, stream) so parallel work never shares state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  std::uint64_t seed() const noexcept { return seed_; }
  Rng derive(std::uint64_t stream) const { return Rng(mix(seed_ ^ mix(stream + 0x51ed27u))); }

  std::uint64_t next_u64() { return engine_(); }
  double uniform();  // [0, 1)
  double uniform_open();  // (0, 1)
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  double gamma(double shape, double rate = 1.0);
  // log of a Gamma(shape, 1) draw; stays finite for very small shapes.
  double log_gamma_draw(double shape);
  double beta(double a, double b);
  bool bernoulli(double p);
  long binomial(long n, double p);
  double chi_squared(double dof);
  std::size_t uniform_index(std::size_t n);

  Eigen::VectorXd dirichlet(const Eigen::VectorXd& concentration);
  // Index drawn proportionally to exp(log_weights).
  std::size_t categorical_log(std::span<const double> log_weights);
  std::size_t categorical(std::span<const double> weights);

  // Draw from Wishart(scale, dof) via the Bartlett decomposition.
  Eigen::MatrixXd wishart(const Eigen::MatrixXd& scale, double dof);
  // Draw from Inverse-Wishart(psi, dof): inverse of Wishart(psi^{-1}, dof).
  Eigen::MatrixXd inverse_wishart(const Eigen::MatrixXd& psi, double dof);

 private:
  static std::uint64_t mix(std::uint64_t x) noexcept {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

Rng seeded_rng(std::uint64_t seed);

// log(sum(exp(v))) with -inf handling.
double log_sum_exp(std::span<const double> v) noexcept;

}  // namespace regimes
