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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "regimes/core.hpp"
#include "regimes/gaussian_hmm.hpp"

namespace testing {

using Gen = std::mt19937_64;

inline double unif(Gen& g, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline int unif_int(Gen& g, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); }

inline double gauss(Gen& g) { return std::normal_distribution<double>(0.0, 1.0)(g); }

// Strictly positive probability vector.
inline Eigen::VectorXd random_simplex(Gen& g, int n) {
  Eigen::VectorXd p(n);
  for (int i = 0; i < n; ++i) p(i) = 0.05 + unif(g);
  return p / p.sum();
}

inline regimes::Mat2 random_spd(Gen& g, double lo = 0.3, double hi = 2.0) {
  const double a = unif(g, lo, hi), b = unif(g, lo, hi);
  const double c = unif(g, -0.8, 0.8) * std::sqrt(a * b);
  regimes::Mat2 m;
  m << a, c, c, b;
  return m;
}

inline regimes::ChannelSet random_channels(Gen& g, int count) {
  std::vector<regimes::Modality> all(regimes::kAllModalities.begin(), regimes::kAllModalities.end());
  std::shuffle(all.begin(), all.end(), g);
  regimes::ChannelSet cs;
  for (int i = 0; i < count; ++i) cs.insert(all[std::size_t(i)]);
  return cs;
}

inline regimes::HmmModel random_model(Gen& g, int K, regimes::ChannelSet channels, bool tied = false) {
  regimes::HmmModel m;
  m.channels = channels;
  m.tied_covariance = tied;
  m.initial = random_simplex(g, K);
  m.transitions.resize(K, K);
  for (int j = 0; j < K; ++j) m.transitions.row(j) = random_simplex(g, K).transpose();
  const std::size_t C = channels.size();
  std::vector<regimes::Mat2> shared;
  for (std::size_t c = 0; c < C; ++c) shared.push_back(random_spd(g));
  for (int k = 0; k < K; ++k) {
    std::vector<regimes::GaussianEmission> row;
    for (std::size_t c = 0; c < C; ++c) {
      const regimes::Vec2 mu(unif(g, -2.0, 2.0), unif(g, -2.0, 2.0));
      row.emplace_back(mu, tied ? shared[c] : random_spd(g));
    }
    m.emissions.push_back(row);
  }
  return m;
}

inline regimes::ConversationSeries random_series(Gen& g, std::size_t T, regimes::ChannelSet channels,
                                                 double spread = 2.0, const std::string& id = "rand") {
  std::vector<regimes::Observation> obs(T);
  for (auto& o : obs)
    for (auto m : channels.modalities()) o.set(m, {spread * gauss(g), spread * gauss(g)});
  return regimes::ConversationSeries(id, obs);
}

// Series from a list of 2-D points on the text channel only.
inline regimes::ConversationSeries text_series(const std::vector<std::pair<double, double>>& pts,
                                               const std::string& id = "s") {
  std::vector<regimes::Observation> obs(pts.size());
  for (std::size_t t = 0; t < pts.size(); ++t) obs[t].set(regimes::Modality::Text, {pts[t].first, pts[t].second});
  return regimes::ConversationSeries(id, obs);
}

// Bivariate normal log density from the closed-form 2x2 inverse and determinant.
inline double mvn2_logpdf(const regimes::Vec2& x, const regimes::Vec2& mu, const regimes::Mat2& S) {
  const double a = S(0, 0), b = S(0, 1), d = S(1, 1);
  const double det = a * d - b * b;
  const double dx = x(0) - mu(0), dy = x(1) - mu(1);
  const double q = (d * dx * dx - 2.0 * b * dx * dy + a * dy * dy) / det;
  return -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(det) - 0.5 * q;
}

inline double oracle_emission(const regimes::HmmModel& m, const regimes::Observation& o, int k) {
  double s = 0.0;
  const auto mods = m.channels.modalities();
  for (std::size_t c = 0; c < mods.size(); ++c) {
    const auto& e = m.emissions[std::size_t(k)][c];
    s += mvn2_logpdf(o.at(mods[c]).vec(), e.mean(), e.covariance());
  }
  return s;
}

inline double oracle_path_logprob(const regimes::HmmModel& m, const regimes::ConversationSeries& s,
                                  const std::vector<int>& z) {
  double lp = std::log(m.initial(z[0])) + oracle_emission(m, s[0], z[0]);
  for (std::size_t t = 1; t < z.size(); ++t)
    lp += std::log(m.transitions(z[t - 1], z[t])) + oracle_emission(m, s[t], z[t]);
  return lp;
}

// Calls f(path) for every path in lexicographic order.
template <class F>
void for_each_path(int K, std::size_t T, F f) {
  std::vector<int> z(T, 0);
  for (;;) {
    f(static_cast<const std::vector<int>&>(z));
    std::size_t i = T;
    while (i > 0) {
      --i;
      if (++z[i] < K) break;
      z[i] = 0;
      if (i == 0) return;
    }
    if (T == 0) return;
  }
}

struct BruteForce {
  double log_likelihood = 0.0;
  std::vector<int> best_path;
  double best_log_prob = -std::numeric_limits<double>::infinity();
};

inline BruteForce brute_force(const regimes::HmmModel& m, const regimes::ConversationSeries& s) {
  BruteForce out;
  std::vector<double> lps;
  for_each_path(m.num_states(), s.size(), [&](const std::vector<int>& z) {
    const double lp = oracle_path_logprob(m, s, z);
    lps.push_back(lp);
    if (lp > out.best_log_prob) {
      out.best_log_prob = lp;
      out.best_path = z;
    }
  });
  const double mx = *std::max_element(lps.begin(), lps.end());
  double acc = 0.0;
  for (double v : lps) acc += std::exp(v - mx);
  out.log_likelihood = mx + std::log(acc);
  return out;
}

// Minimum total cost over all permutations of the zero-padded square matrix.
inline std::int64_t brute_min_cost(const std::vector<std::vector<std::int64_t>>& cost) {
  const std::size_t M = cost.size(), K = M ? cost[0].size() : 0, n = std::max(M, K);
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  do {
    std::int64_t total = 0;
    for (std::size_t i = 0; i < M; ++i)
      if (perm[i] < K) total += cost[i][perm[i]];
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline regimes::LabelSequence labels(std::vector<int> v) { return regimes::LabelSequence(std::move(v)); }

}  // namespace testing
