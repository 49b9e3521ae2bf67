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

#include "regimes/synthetic.hpp"

#include <cmath>

#include "regimes/error.hpp"
#include "regimes/random.hpp"

namespace regimes {

void SynthConfig::validate() const {
  if (num_regimes < 1) throw Error(ErrorCode::InvalidArgument, "need at least one regime");
  if (length < 1) throw Error(ErrorCode::InvalidArgument, "length must be >= 1");
  if (!(self_transition > 0.0 && self_transition <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "self_transition must lie in (0, 1]");
  if (!(covariance_scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "covariance_scale must be > 0");
  if (!(decoupling >= 0.0 && decoupling <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "decoupling must lie in [0, 1]");
  if (!(min_separation >= 0.0)) throw Error(ErrorCode::InvalidArgument, "min_separation must be >= 0");
  if (modalities.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one modality");
  if (!means.empty()) {
    if (means.size() != std::size_t(num_regimes))
      throw Error(ErrorCode::InvalidArgument, "means must list every regime");
    for (const auto& m : means)
      if (m.size() != modalities.size())
        throw Error(ErrorCode::InvalidArgument, "means must list every modality");
  }
}

std::vector<std::vector<Vec2>> regime_means(const SynthConfig& cfg) {
  if (!cfg.means.empty()) return cfg.means;
  // Regular polygon whose chord equals the requested separation; each
  // modality gets its own rotation so channels are not copies of each other.
  const int K = cfg.num_regimes;
  const std::size_t C = cfg.modalities.size();
  const double radius = K > 1 ? cfg.min_separation / (2.0 * std::sin(M_PI / K)) : 0.0;
  std::vector<std::vector<Vec2>> out(static_cast<std::size_t>(K), std::vector<Vec2>(C));
  for (int k = 0; k < K; ++k)
    for (std::size_t c = 0; c < C; ++c) {
      const double angle = 2.0 * M_PI * k / K + 0.5 * double(c);
      out[std::size_t(k)][c] = radius * Vec2(std::cos(angle), std::sin(angle));
    }
  return out;
}

std::pair<ConversationSeries, LabelSequence> generate(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng = seeded_rng(cfg.seed);
  const auto means = regime_means(cfg);
  const int K = cfg.num_regimes;
  const auto ms = cfg.modalities.modalities();
  const double off = K > 1 ? (1.0 - cfg.self_transition) / (K - 1) : 0.0;

  LabelSequence labels;
  labels.labels.reserve(cfg.length);
  int z = int(rng.uniform_index(std::size_t(K)));
  for (std::size_t t = 0; t < cfg.length; ++t) {
    if (t > 0 && K > 1) {
      std::vector<double> row(static_cast<std::size_t>(K), off);
      row[std::size_t(z)] = cfg.self_transition;
      z = int(rng.categorical(row));
    }
    labels.labels.push_back(z);
  }

  std::vector<Observation> obs;
  obs.reserve(cfg.length);
  for (std::size_t t = 0; t < cfg.length; ++t) {
    Observation o;
    for (std::size_t c = 0; c < ms.size(); ++c) {
      int source = labels[t];
      if (K > 1 && cfg.decoupling > 0.0 && rng.bernoulli(cfg.decoupling)) {
        const int shift = 1 + int(rng.uniform_index(std::size_t(K - 1)));
        source = (source + shift) % K;
      }
      const Vec2& mu = means[std::size_t(source)][c];
      o.set(ms[c], {mu[0] + cfg.covariance_scale * rng.normal(),
                    mu[1] + cfg.covariance_scale * rng.normal()});
    }
    obs.push_back(o);
  }
  return {ConversationSeries(cfg.id, std::move(obs)), std::move(labels)};
}

}  // namespace regimes
