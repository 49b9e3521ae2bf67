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
#include <string>
#include <utility>
#include <vector>

#include "regimes/core.hpp"

namespace regimes {

// Sticky Markov chain with per-modality Gaussian emissions and known labels.
struct SynthConfig {
  int num_regimes = 3;
  std::size_t length = 120;
  double self_transition = 0.95;
  // means[k][c]: regime k, c-th channel of `modalities`. Empty = automatic
  // placement with pairwise separation >= min_separation.
  std::vector<std::vector<Vec2>> means;
  double min_separation = 3.0;
  double covariance_scale = 1.0;  // per-dimension standard deviation
  ChannelSet modalities{Modality::Text, Modality::Audio};
  double decoupling = 0.0;
  std::uint64_t seed = 0;
  std::string id = "synth";

  void validate() const;
};

// Means used by the generator: the configured ones or the automatic layout.
std::vector<std::vector<Vec2>> regime_means(const SynthConfig& cfg);

// Raw (unstandardized) series plus ground-truth labels.
std::pair<ConversationSeries, LabelSequence> generate(const SynthConfig& cfg);

}  // namespace regimes
