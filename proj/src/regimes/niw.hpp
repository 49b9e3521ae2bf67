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

#include <span>

#include "regimes/core.hpp"
#include "regimes/random.hpp"

namespace regimes {

// Normal-Inverse-Wishart prior on one 2-D Gaussian channel:
//   Sigma ~ IW(scale, dof),  mu | Sigma ~ N(mean, Sigma / mean_confidence)
struct NiwPrior {
  Vec2 mean = Vec2::Zero();
  double mean_confidence = 0.5;
  Mat2 scale = 0.75 * Mat2::Identity();
  double dof = 4.0;

  void validate() const;
};

// Count, mean and centered scatter of the points a state owns.
struct GaussianStats {
  double count = 0.0;
  Vec2 mean = Vec2::Zero();
  Mat2 scatter = Mat2::Zero();

  static GaussianStats of(std::span<const Vec2> points);
};

// Conjugate update; the result is again an NIW over (mu, Sigma).
NiwPrior niw_posterior(const NiwPrior& prior, const GaussianStats& stats);

// One (mu, Sigma) draw. Jitter is added to the sampled covariance.
GaussianEmission sample_niw(const NiwPrior& niw, Rng& rng);

}  // namespace regimes
