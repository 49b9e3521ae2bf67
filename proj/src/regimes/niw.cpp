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

#include "regimes/niw.hpp"

#include "regimes/error.hpp"

namespace regimes {

void NiwPrior::validate() const {
  if (!(mean_confidence > 0.0)) throw Error(ErrorCode::InvalidArgument, "NIW mean confidence must be > 0");
  if (!(dof > 1.0)) throw Error(ErrorCode::InvalidArgument, "NIW degrees of freedom must exceed d - 1");
  if (std::abs(scale(0, 1) - scale(1, 0)) > 1e-12 || scale.llt().info() != Eigen::Success ||
      !(scale(0, 0) > 0.0) || !(scale.determinant() > 0.0))
    throw Error(ErrorCode::InvalidArgument, "NIW scale matrix must be symmetric positive definite");
}

GaussianStats GaussianStats::of(std::span<const Vec2> points) {
  GaussianStats s;
  s.count = double(points.size());
  if (points.empty()) return s;
  for (const auto& p : points) s.mean += p;
  s.mean /= s.count;
  for (const auto& p : points) {
    const Vec2 r = p - s.mean;
    s.scatter += r * r.transpose();
  }
  return s;
}

NiwPrior niw_posterior(const NiwPrior& prior, const GaussianStats& stats) {
  if (stats.count <= 0.0) return prior;
  const double n = stats.count;
  NiwPrior post;
  post.mean_confidence = prior.mean_confidence + n;
  post.dof = prior.dof + n;
  post.mean = (prior.mean_confidence * prior.mean + n * stats.mean) / post.mean_confidence;
  const Vec2 d = stats.mean - prior.mean;
  post.scale = prior.scale + stats.scatter +
               (prior.mean_confidence * n / post.mean_confidence) * (d * d.transpose());
  post.scale = 0.5 * (post.scale + post.scale.transpose());
  return post;
}

GaussianEmission sample_niw(const NiwPrior& niw, Rng& rng) {
  Mat2 sigma = rng.inverse_wishart(niw.scale, niw.dof);
  sigma = 0.5 * (sigma + sigma.transpose());
  sigma.diagonal().array() += kCovarianceJitter;
  const Mat2 chol = (sigma / niw.mean_confidence).llt().matrixL();
  const Vec2 z(rng.normal(), rng.normal());
  return GaussianEmission(niw.mean + chol * z, sigma);
}

}  // namespace regimes
