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

#include "regimes/gaussian_hmm.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "regimes/error.hpp"
#include "regimes/hmm_kernels.hpp"
#include "regimes/kmeans.hpp"

namespace regimes {
namespace {

constexpr double kCollapseMass = 1e-8;

Eigen::VectorXd log_of(const Eigen::VectorXd& v) { return v.array().log(); }
Eigen::MatrixXd log_of(const Eigen::MatrixXd& m) { return m.array().log(); }

void check_channels(const HmmModel& model, ChannelSet channels) {
  if (!(model.channels == channels))
    throw Error(ErrorCode::ChannelMismatch, "model channels " + model.channels.to_string() +
                                                " do not match observation channels " +
                                                channels.to_string());
}

Mat2 with_jitter(const Mat2& m) {
  Mat2 s = 0.5 * (m + m.transpose());
  s.diagonal().array() += kCovarianceJitter;
  return s;
}

// Per-channel mixture log-likelihood of each observation under `model`,
// weighting states by `weights`.
double mixture_loglik(const HmmModel& model, const Observation& obs, const Eigen::VectorXd& weights) {
  std::vector<double> terms;
  for (int k = 0; k < model.num_states(); ++k)
    terms.push_back(std::log(weights[k]) + emission_loglik(model, obs, k));
  return log_sum_exp(terms);
}

}  // namespace

void HmmModel::validate() const {
  const Eigen::Index K = initial.size();
  if (K < 1) throw Error(ErrorCode::InvalidArgument, "model has no states");
  if (transitions.rows() != K || transitions.cols() != K)
    throw Error(ErrorCode::InvalidArgument, "transition matrix shape does not match state count");
  if ((initial.array() < 0.0).any() || std::abs(initial.sum() - 1.0) > 1e-9)
    throw Error(ErrorCode::InvalidArgument, "initial distribution is not on the simplex");
  for (Eigen::Index j = 0; j < K; ++j)
    if ((transitions.row(j).array() < 0.0).any() || std::abs(transitions.row(j).sum() - 1.0) > 1e-9)
      throw Error(ErrorCode::InvalidArgument,
                  "transition row " + std::to_string(j) + " is not on the simplex");
  if (emissions.size() != std::size_t(K))
    throw Error(ErrorCode::InvalidArgument, "emission table does not match state count");
  for (const auto& e : emissions)
    if (e.size() != channels.size())
      throw Error(ErrorCode::InvalidArgument, "emission table does not match channel set");
}

double emission_loglik(const HmmModel& model, const Observation& obs, int state) {
  check_channels(model, obs.channels());
  if (state < 0 || state >= model.num_states())
    throw Error(ErrorCode::InvalidArgument, "state index out of range");
  const auto ms = model.channels.modalities();
  double ll = 0.0;
  for (std::size_t c = 0; c < ms.size(); ++c)
    ll += model.emissions[std::size_t(state)][c].log_pdf(obs.at(ms[c]).vec());
  return ll;
}

Eigen::MatrixXd emission_matrix(const HmmModel& model, const ConversationSeries& series) {
  check_channels(model, series.channels());
  const int K = model.num_states();
  const auto ms = model.channels.modalities();
  Eigen::MatrixXd le(Eigen::Index(series.size()), K);
  for (std::size_t t = 0; t < series.size(); ++t)
    for (int k = 0; k < K; ++k) {
      double ll = 0.0;
      for (std::size_t c = 0; c < ms.size(); ++c)
        ll += model.emissions[std::size_t(k)][c].log_pdf(series[t].at(ms[c]).vec());
      le(Eigen::Index(t), k) = ll;
    }
  return le;
}

double forward_loglik(const HmmModel& model, const ConversationSeries& series) {
  return kernels::forward(emission_matrix(model, series), log_of(model.initial),
                          log_of(model.transitions))
      .log_likelihood;
}

Decoding viterbi(const HmmModel& model, const ConversationSeries& series) {
  auto r = kernels::viterbi(emission_matrix(model, series), log_of(model.initial),
                            log_of(model.transitions));
  return {LabelSequence(std::move(r.path)), r.log_prob};
}

HmmModel initial_model(std::span<const ConversationSeries> series, const EmConfig& cfg, Rng& rng) {
  const int K = cfg.num_states;
  const ChannelSet channels = series.front().channels();
  const auto ms = channels.modalities();
  std::size_t total = 0;
  for (const auto& s : series) total += s.size();
  Eigen::MatrixXd points(Eigen::Index(total), 2 * Eigen::Index(ms.size()));
  Eigen::Index row = 0;
  for (const auto& s : series) {
    const auto x = s.stacked();
    points.middleRows(row, x.rows()) = x;
    row += x.rows();
  }
  const auto km = kmeans(points, K, rng);

  HmmModel m;
  m.channels = channels;
  m.tied_covariance = cfg.tied_covariance;
  m.initial = Eigen::VectorXd::Constant(K, 1.0 / K);
  m.transitions = cfg.init_self_mass * Eigen::MatrixXd::Identity(K, K) +
                  Eigen::MatrixXd::Constant(K, K, (1.0 - cfg.init_self_mass) / K);
  // Pooled per-channel covariance as the starting (tied) covariance.
  std::vector<Mat2> covs;
  for (std::size_t c = 0; c < ms.size(); ++c) {
    const Eigen::MatrixXd block = points.middleCols(2 * Eigen::Index(c), 2);
    const Eigen::RowVector2d mu = block.colwise().mean();
    const Eigen::MatrixXd centered = block.rowwise() - mu;
    covs.push_back(with_jitter(centered.transpose() * centered / double(total)));
  }
  m.emissions.resize(std::size_t(K));
  for (int k = 0; k < K; ++k)
    for (std::size_t c = 0; c < ms.size(); ++c)
      m.emissions[std::size_t(k)].emplace_back(
          Vec2(km.centers(k, 2 * Eigen::Index(c)), km.centers(k, 2 * Eigen::Index(c) + 1)),
          covs[c]);
  return m;
}

EmRun run_em(std::span<const ConversationSeries> series, HmmModel model, const EmConfig& cfg) {
  const int K = model.num_states();
  const auto ms = model.channels.modalities();
  const std::size_t C = ms.size();
  EmRun run;
  std::vector<int> collapse_streak(static_cast<std::size_t>(K), 0);
  double prev = -std::numeric_limits<double>::infinity();
  bool converged = false;

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    // E-step
    std::vector<kernels::Posteriors> post;
    double ll = 0.0;
    const Eigen::VectorXd li = log_of(model.initial);
    const Eigen::MatrixXd lt = log_of(model.transitions);
    for (const auto& s : series) {
      post.push_back(kernels::smooth(emission_matrix(model, s), li, lt));
      ll += post.back().log_likelihood;
    }
    run.trace.push_back(ll);
    run.iterations = iter + 1;
    if (iter > 0 && ll - prev <= cfg.tol * std::abs(prev)) {
      run.log_likelihood = ll;
      converged = true;
      break;
    }
    prev = ll;

    // M-step
    Eigen::VectorXd init = Eigen::VectorXd::Zero(K);
    Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(K, K);
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(K);
    std::vector<std::vector<Vec2>> sums(static_cast<std::size_t>(K), std::vector<Vec2>(C, Vec2::Zero()));
    for (std::size_t si = 0; si < series.size(); ++si) {
      const auto& p = post[si];
      init += p.gamma.row(0).transpose();
      xi += p.xi_sum;
      for (std::size_t t = 0; t < series[si].size(); ++t)
        for (int k = 0; k < K; ++k) {
          const double g = p.gamma(Eigen::Index(t), k);
          mass[k] += g;
          for (std::size_t c = 0; c < C; ++c) sums[std::size_t(k)][c] += g * series[si][t].at(ms[c]).vec();
        }
    }
    HmmModel next = model;
    next.initial = init / init.sum();
    for (int j = 0; j < K; ++j) {
      const double row = xi.row(j).sum();
      if (row > 0.0) next.transitions.row(j) = xi.row(j) / row;
    }
    std::vector<std::vector<Vec2>> means(static_cast<std::size_t>(K), std::vector<Vec2>(C));
    std::vector<int> collapsed;
    for (int k = 0; k < K; ++k) {
      if (mass[k] < kCollapseMass) {
        collapsed.push_back(k);
        for (std::size_t c = 0; c < C; ++c) means[std::size_t(k)][c] = model.emissions[std::size_t(k)][c].mean();
      } else {
        for (std::size_t c = 0; c < C; ++c) means[std::size_t(k)][c] = sums[std::size_t(k)][c] / mass[k];
      }
    }
    // Scatter around the new means.
    const double total_mass = mass.sum();
    std::vector<std::vector<Mat2>> scatter(static_cast<std::size_t>(K), std::vector<Mat2>(C, Mat2::Zero()));
    for (std::size_t si = 0; si < series.size(); ++si)
      for (std::size_t t = 0; t < series[si].size(); ++t)
        for (int k = 0; k < K; ++k) {
          const double g = post[si].gamma(Eigen::Index(t), k);
          for (std::size_t c = 0; c < C; ++c) {
            const Vec2 r = series[si][t].at(ms[c]).vec() - means[std::size_t(k)][c];
            scatter[std::size_t(k)][c] += g * r * r.transpose();
          }
        }
    for (std::size_t c = 0; c < C; ++c) {
      if (model.tied_covariance) {
        Mat2 pooled = Mat2::Zero();
        for (int k = 0; k < K; ++k) pooled += scatter[std::size_t(k)][c];
        const Mat2 cov = with_jitter(pooled / total_mass);
        for (int k = 0; k < K; ++k)
          next.emissions[std::size_t(k)][c] = GaussianEmission(means[std::size_t(k)][c], cov);
      } else {
        for (int k = 0; k < K; ++k) {
          const Mat2 cov = mass[k] < kCollapseMass
                               ? model.emissions[std::size_t(k)][c].covariance()
                               : with_jitter(scatter[std::size_t(k)][c] / mass[k]);
          next.emissions[std::size_t(k)][c] = GaussianEmission(means[std::size_t(k)][c], cov);
        }
      }
    }

    // Collapsed states move to the observation the current model explains worst.
    if (!collapsed.empty()) {
      const Eigen::VectorXd w = (mass.array() + 1e-300) / (total_mass + K * 1e-300);
      std::size_t worst_s = 0, worst_t = 0;
      double worst = std::numeric_limits<double>::infinity();
      for (std::size_t si = 0; si < series.size(); ++si)
        for (std::size_t t = 0; t < series[si].size(); ++t) {
          const double v = mixture_loglik(model, series[si][t], w);
          if (v < worst) {
            worst = v;
            worst_s = si;
            worst_t = t;
          }
        }
      for (int k : collapsed) {
        if (++collapse_streak[std::size_t(k)] > 2)
          throw Error(ErrorCode::EmptyStateCollapse,
                      "state " + std::to_string(k) + " stayed empty after re-seeding twice");
        for (std::size_t c = 0; c < C; ++c)
          next.emissions[std::size_t(k)][c] =
              GaussianEmission(series[worst_s][worst_t].at(ms[c]).vec(),
                               next.emissions[std::size_t(k)][c].covariance());
      }
      run.reseeded_at.push_back(iter);
    }
    for (int k = 0; k < K; ++k)
      if (mass[k] >= kCollapseMass) collapse_streak[std::size_t(k)] = 0;
    model = std::move(next);
  }

  if (!converged) {
    double ll = 0.0;
    for (const auto& s : series) ll += forward_loglik(model, s);
    run.log_likelihood = ll;
  }
  run.model = std::move(model);
  return run;
}

EmResult fit_em(std::span<const ConversationSeries> series, const EmConfig& cfg) {
  if (cfg.num_states < 1 || cfg.max_iters < 1 || !(cfg.tol > 0.0) || cfg.n_restarts < 1)
    throw Error(ErrorCode::InvalidArgument, "EM config needs K >= 1, max_iters >= 1, tol > 0");
  if (series.empty()) throw Error(ErrorCode::EmptySeries, "no series to fit");
  for (const auto& s : series) {
    if (s.size() < 2)
      throw Error(ErrorCode::DegenerateInput, "series '" + s.id() + "' has fewer than 2 steps");
    if (!(s.channels() == series.front().channels()))
      throw Error(ErrorCode::ChannelMismatch, "pooled series disagree on channel set");
  }
  const Rng base(cfg.seed);
  EmResult result;
  std::string last_failure;
  for (int r = 0; r < cfg.n_restarts; ++r) {
    Rng rng = base.derive(std::uint64_t(r));
    try {
      result.runs.push_back(run_em(series, initial_model(series, cfg, rng), cfg));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyStateCollapse) throw;
      last_failure = e.what();
    }
  }
  if (result.runs.empty())
    throw Error(ErrorCode::EmptyStateCollapse, "every restart failed: " + last_failure);
  for (std::size_t i = 1; i < result.runs.size(); ++i)
    if (result.runs[i].log_likelihood > result.runs[std::size_t(result.best_run)].log_likelihood)
      result.best_run = int(i);
  result.model = result.runs[std::size_t(result.best_run)].model;
  result.log_likelihood = result.runs[std::size_t(result.best_run)].log_likelihood;
  return result;
}

EmResult fit_em(const ConversationSeries& series, const EmConfig& cfg) {
  return fit_em(std::span<const ConversationSeries>(&series, 1), cfg);
}

HmmModel split_state(const HmmModel& model, int k) {
  const int K = model.num_states();
  HmmModel m = model;
  m.initial.conservativeResize(K + 1);
  m.initial[K] = 0.5 * model.initial[k];
  m.initial[k] = 0.5 * model.initial[k];
  m.transitions = Eigen::MatrixXd::Zero(K + 1, K + 1);
  m.transitions.topLeftCorner(K, K) = model.transitions;
  m.transitions.row(K).head(K) = model.transitions.row(k);
  for (int i = 0; i <= K; ++i) {
    const double half = 0.5 * m.transitions(i, k);
    m.transitions(i, k) = half;
    m.transitions(i, K) = half;
  }
  m.emissions.push_back(model.emissions[std::size_t(k)]);
  return m;
}

HmmModel permute_states(const HmmModel& model, const std::vector<int>& order) {
  const int K = model.num_states();
  HmmModel m = model;
  for (int i = 0; i < K; ++i) {
    m.initial[i] = model.initial[order[std::size_t(i)]];
    m.emissions[std::size_t(i)] = model.emissions[std::size_t(order[std::size_t(i)])];
    for (int j = 0; j < K; ++j)
      m.transitions(i, j) = model.transitions(order[std::size_t(i)], order[std::size_t(j)]);
  }
  return m;
}

}  // namespace regimes
