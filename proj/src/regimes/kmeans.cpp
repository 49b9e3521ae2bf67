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

#include "regimes/kmeans.hpp"

#include <limits>

#include "regimes/error.hpp"

namespace regimes {

Eigen::MatrixXd kmeans_pp_seeds(const Eigen::MatrixXd& points, int k, Rng& rng) {
  const Eigen::Index n = points.rows();
  if (n == 0 || k < 1) throw Error(ErrorCode::InvalidArgument, "k-means needs points and k >= 1");
  Eigen::MatrixXd centers(k, points.cols());
  centers.row(0) = points.row(Eigen::Index(rng.uniform_index(std::size_t(n))));
  std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = (points.row(i) - centers.row(c - 1)).squaredNorm();
      d2[std::size_t(i)] = std::min(d2[std::size_t(i)], d);
      total += d2[std::size_t(i)];
    }
    const std::size_t pick =
        total > 0.0 ? rng.categorical(d2) : rng.uniform_index(std::size_t(n));
    centers.row(c) = points.row(Eigen::Index(pick));
  }
  return centers;
}

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, Rng& rng, int max_iters) {
  KMeansResult r;
  r.centers = kmeans_pp_seeds(points, k, rng);
  const Eigen::Index n = points.rows();
  r.assignment.assign(std::size_t(n), -1);
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (points.row(i) - r.centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (r.assignment[std::size_t(i)] != best) {
        r.assignment[std::size_t(i)] = best;
        changed = true;
      }
    }
    if (!changed) break;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(r.assignment[std::size_t(i)]) += points.row(i);
      ++counts[std::size_t(r.assignment[std::size_t(i)])];
    }
    for (int c = 0; c < k; ++c)
      if (counts[std::size_t(c)] > 0) r.centers.row(c) = sums.row(c) / counts[std::size_t(c)];
  }
  return r;
}

}  // namespace regimes
