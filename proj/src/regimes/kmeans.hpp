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

namespace regimes {

struct KMeansResult {
  Eigen::MatrixXd centers;   // k x dim
  std::vector<int> assignment;
};

// k-means++ seeding followed by Lloyd iterations. Rows of `points` are samples.
// Empty clusters keep their previous center.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, Rng& rng, int max_iters = 50);

// Only the k-means++ D^2 seeding step.
Eigen::MatrixXd kmeans_pp_seeds(const Eigen::MatrixXd& points, int k, Rng& rng);

}  // namespace regimes
