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

#include "regimes/sticky_hdphmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "regimes/error.hpp"
#include "regimes/hmm_kernels.hpp"
#include "regimes/kmeans.hpp"

namespace regimes {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double mean_valence(const std::vector<GaussianEmission>& per_channel) {
  double v = 0.0;
  for (const auto& e : per_channel) v += e.mean()[0];
  return v / double(per_channel.size());
}

// Per-state, per-channel sufficient statistics of the points assigned by z.
std::vector<std::vector<GaussianStats>> assigned_stats(const std::vector<int>& z, int k_max,
                                                       const ConversationSeries& series) {
  const auto ms = series.channels().modalities();
  std::vector<std::vector<std::vector<Vec2>>> pts(
      std::size_t(k_max), std::vector<std::vector<Vec2>>(ms.size()));
  for (std::size_t t = 0; t < series.size(); ++t)
    for (std::size_t c = 0; c < ms.size(); ++c)
      pts[std::size_t(z[t])][c].push_back(series[t].at(ms[c]).vec());
  std::vector<std::vector<GaussianStats>> out(static_cast<std::size_t>(k_max));
  for (int k = 0; k < k_max; ++k)
    for (std::size_t c = 0; c < ms.size(); ++c)
      out[std::size_t(k)].push_back(GaussianStats::of(pts[std::size_t(k)][c]));
  return out;
}

SamplerState permute(const SamplerState& s, const std::vector<int>& order) {
  const int K = s.k_max();
  std::vector<int> inverse(static_cast<std::size_t>(K));
  for (int i = 0; i < K; ++i) inverse[std::size_t(order[std::size_t(i)])] = i;
  SamplerState p = s;
  for (auto& zt : p.z) zt = inverse[std::size_t(zt)];
  for (int i = 0; i < K; ++i) {
    const int o = order[std::size_t(i)];
    p.beta[i] = s.beta[o];
    p.initial[i] = s.initial[o];
    p.emissions[std::size_t(i)] = s.emissions[std::size_t(o)];
    p.overrides[i] = s.overrides[o];
    for (int j = 0; j < K; ++j) {
      p.pi(i, j) = s.pi(o, order[std::size_t(j)]);
      p.tables(i, j) = s.tables(o, order[std::size_t(j)]);
    }
  }
  return p;
}

}  // namespace

StickyHypers HyperPriors::prior_mean() const {
  const double conc = concentration_shape / concentration_rate;
  const double rho = rho_a / (rho_a + rho_b);
  return {(1.0 - rho) * conc, rho * conc, gamma_shape / gamma_rate};
}

void StickyConfig::validate() const {
  if (k_max < 2) throw Error(ErrorCode::InvalidArgument, "K_max must be >= 2");
  if (burn_in < 0 || n_samples < 1 || thin < 1)
    throw Error(ErrorCode::InvalidArgument, "need burn_in >= 0, n_samples >= 1, thin >= 1");
  const auto& h = hyper_priors;
  if (!(h.concentration_shape > 0 && h.concentration_rate > 0 && h.gamma_shape > 0 &&
        h.gamma_rate > 0 && h.rho_a > 0 && h.rho_b > 0))
    throw Error(ErrorCode::InvalidArgument, "hyperprior parameters must be > 0");
  if (!sample_hypers && fixed_hypers) {
    const auto& f = *fixed_hypers;
    if (!(f.alpha > 0.0) || f.kappa < 0.0 || !(f.gamma > 0.0))
      throw Error(ErrorCode::InvalidArgument, "fixed hypers need alpha > 0, kappa >= 0, gamma > 0");
  }
}

void SamplerState::validate() const {
  const int K = k_max();
  auto on_simplex = [](const Eigen::VectorXd& v) {
    return (v.array() >= 0.0).all() && std::abs(v.sum() - 1.0) <= 1e-9;
  };
  if (!on_simplex(beta)) throw Error(ErrorCode::InvalidArgument, "beta is off the simplex");
  if (!on_simplex(initial)) throw Error(ErrorCode::InvalidArgument, "initial is off the simplex");
  for (int j = 0; j < K; ++j)
    if (!on_simplex(pi.row(j).transpose()))
      throw Error(ErrorCode::InvalidArgument, "transition row off the simplex");
  const auto n = transition_counts(z, K);
  for (int j = 0; j < K; ++j)
    for (int k = 0; k < K; ++k)
      if ((n(j, k) == 0 && tables(j, k) != 0) || tables(j, k) > n(j, k) || tables(j, k) < 0)
        throw Error(ErrorCode::InvalidArgument, "table counts inconsistent with transitions");
  for (int j = 0; j < K; ++j)
    if (overrides[j] < 0 || overrides[j] > tables(j, j))
      throw Error(ErrorCode::InvalidArgument, "override counts exceed self-transition tables");
}

Eigen::MatrixXi transition_counts(const std::vector<int>& z, int k_max) {
  Eigen::MatrixXi n = Eigen::MatrixXi::Zero(k_max, k_max);
  for (std::size_t t = 1; t < z.size(); ++t) ++n(z[t - 1], z[t]);
  return n;
}

Eigen::MatrixXi override_corrected(const Eigen::MatrixXi& tables, const Eigen::VectorXi& overrides) {
  Eigen::MatrixXi m = tables;
  for (Eigen::Index j = 0; j < m.rows(); ++j) m(j, j) -= overrides[j];
  return m;
}

Eigen::MatrixXd emission_matrix(const SamplerState& state, const ConversationSeries& series) {
  if (!(state.channels == series.channels()))
    throw Error(ErrorCode::ChannelMismatch, "sampler channels do not match series");
  const auto ms = series.channels().modalities();
  const int K = state.k_max();
  Eigen::MatrixXd le(Eigen::Index(series.size()), K);
  for (std::size_t t = 0; t < series.size(); ++t)
    for (int k = 0; k < K; ++k) {
      double ll = 0.0;
      for (std::size_t c = 0; c < ms.size(); ++c)
        ll += state.emissions[std::size_t(k)][c].log_pdf(series[t].at(ms[c]).vec());
      le(Eigen::Index(t), k) = ll;
    }
  return le;
}

SamplerState init_sampler(const ConversationSeries& series, const StickyConfig& cfg,
                          const NiwPrior& prior, Rng& rng) {
  cfg.validate();
  prior.validate();
  if (series.size() == 0) throw Error(ErrorCode::EmptySeries, "cannot sample an empty series");
  const int K = cfg.k_max;
  const int clusters = std::min<int>(K, int((series.size() + 3) / 4));

  SamplerState s;
  s.channels = series.channels();
  s.z = kmeans(series.stacked(), clusters, rng).assignment;
  s.hypers = (!cfg.sample_hypers && cfg.fixed_hypers) ? *cfg.fixed_hypers
                                                      : cfg.hyper_priors.prior_mean();
  s.beta = Eigen::VectorXd::Constant(K, 1.0 / K);
  s.tables = Eigen::MatrixXi::Zero(K, K);
  s.overrides = Eigen::VectorXi::Zero(K);
  s.pi = sample_transition_rows(s, rng);
  s.initial = sample_initial(s, rng);
  s.emissions.resize(std::size_t(K));
  s.emissions = sample_emissions(s, series, prior, rng);
  return s;
}

std::vector<int> sample_state_sequence(const SamplerState& state, const ConversationSeries& series,
                                       Rng& rng) {
  const Eigen::VectorXd li = state.initial.array().log();
  const Eigen::MatrixXd lt = state.pi.array().log();
  return kernels::sample_path(emission_matrix(state, series), li, lt, rng);
}

TableCounts sample_tables(const SamplerState& state, Rng& rng) {
  const int K = state.k_max();
  const auto n = transition_counts(state.z, K);
  const double alpha = state.hypers.alpha, kappa = state.hypers.kappa;
  TableCounts out{Eigen::MatrixXi::Zero(K, K), Eigen::VectorXi::Zero(K)};
  for (int j = 0; j < K; ++j)
    for (int k = 0; k < K; ++k) {
      if (n(j, k) == 0) continue;
      const double weight = alpha * state.beta[k] + (j == k ? kappa : 0.0);
      // The first customer always opens a table.
      int m = 1;
      for (int i = 1; i < n(j, k); ++i)
        if (rng.bernoulli(weight / (double(i) + weight))) ++m;
      out.tables(j, k) = m;
    }
  const double rho = state.hypers.rho();
  for (int j = 0; j < K; ++j) {
    const double denom = rho + state.beta[j] * (1.0 - rho);
    const double p = denom > 0.0 ? rho / denom : 0.0;
    out.overrides[j] = int(rng.binomial(out.tables(j, j), p));
  }
  return out;
}

Eigen::VectorXd sample_beta(const SamplerState& state, Rng& rng) {
  const int K = state.k_max();
  const Eigen::MatrixXi mbar = override_corrected(state.tables, state.overrides);
  Eigen::VectorXd conc(K);
  for (int k = 0; k < K; ++k) conc[k] = state.hypers.gamma / K + double(mbar.col(k).sum());
  return rng.dirichlet(conc);
}

Eigen::MatrixXd sample_transition_rows(const SamplerState& state, Rng& rng) {
  const int K = state.k_max();
  const auto n = transition_counts(state.z, K);
  Eigen::MatrixXd pi(K, K);
  for (int j = 0; j < K; ++j) {
    Eigen::VectorXd conc = state.hypers.alpha * state.beta + n.row(j).transpose().cast<double>();
    conc[j] += state.hypers.kappa;
    pi.row(j) = rng.dirichlet(conc).transpose();
  }
  return pi;
}

Eigen::VectorXd sample_initial(const SamplerState& state, Rng& rng) {
  Eigen::VectorXd conc = state.hypers.alpha * state.beta;
  if (!state.z.empty()) conc[state.z.front()] += 1.0;
  return rng.dirichlet(conc);
}

std::vector<std::vector<GaussianEmission>> sample_emissions(const SamplerState& state,
                                                            const ConversationSeries& series,
                                                            const NiwPrior& prior, Rng& rng) {
  const int K = state.k_max();
  const auto stats = assigned_stats(state.z, K, series);
  std::vector<std::vector<GaussianEmission>> out(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k)
    for (const auto& st : stats[std::size_t(k)])
      out[std::size_t(k)].push_back(sample_niw(niw_posterior(prior, st), rng));
  return out;
}

StickyHypers sample_hypers(const SamplerState& state, const StickyConfig& cfg, Rng& rng) {
  if (!cfg.sample_hypers) return cfg.fixed_hypers ? *cfg.fixed_hypers : state.hypers;
  const auto& hp = cfg.hyper_priors;
  const int K = state.k_max();
  const auto n = transition_counts(state.z, K);
  const double conc = state.hypers.alpha + state.hypers.kappa;

  // (alpha + kappa): one auxiliary (r_j, s_j) pair per restaurant with customers.
  double shape = hp.concentration_shape + double(state.tables.sum());
  double rate = hp.concentration_rate;
  for (int j = 0; j < K; ++j) {
    const double nj = double(n.row(j).sum());
    if (nj <= 0.0) continue;
    rate -= std::log(rng.beta(conc + 1.0, nj));
    if (rng.bernoulli(nj / (nj + conc))) shape -= 1.0;
  }
  const double new_conc = rng.gamma(shape, rate);

  // gamma: the top-level restaurant seats the override-corrected tables.
  const Eigen::MatrixXi mbar = override_corrected(state.tables, state.overrides);
  const double mbar_total = double(mbar.sum());
  double g_shape = hp.gamma_shape, g_rate = hp.gamma_rate;
  if (mbar_total > 0.0) {
    int occupied = 0;
    for (int k = 0; k < K; ++k) occupied += mbar.col(k).sum() > 0 ? 1 : 0;
    g_shape += double(occupied);
    g_rate -= std::log(rng.beta(state.hypers.gamma + 1.0, mbar_total));
    if (rng.bernoulli(mbar_total / (mbar_total + state.hypers.gamma))) g_shape -= 1.0;
  }
  const double new_gamma = rng.gamma(g_shape, g_rate);

  const double w_total = double(state.overrides.sum());
  const double rho = rng.beta(hp.rho_a + w_total, hp.rho_b + double(state.tables.sum()) - w_total);
  return {(1.0 - rho) * new_conc, rho * new_conc, new_gamma};
}

double joint_loglik(const SamplerState& state, const ConversationSeries& series) {
  const Eigen::VectorXd li = state.initial.array().log();
  const Eigen::MatrixXd lt = state.pi.array().log();
  return kernels::path_log_prob(emission_matrix(state, series), li, lt, state.z);
}

void gibbs_sweep(SamplerState& state, const ConversationSeries& series, const StickyConfig& cfg,
                 const NiwPrior& prior, Rng& rng) {
  state.z = sample_state_sequence(state, series, rng);
  auto tc = sample_tables(state, rng);
  state.tables = std::move(tc.tables);
  state.overrides = std::move(tc.overrides);
  state.beta = sample_beta(state, rng);
  state.pi = sample_transition_rows(state, rng);
  state.initial = sample_initial(state, rng);
  state.emissions = sample_emissions(state, series, prior, rng);
  state.hypers = sample_hypers(state, cfg, rng);
}

HmmModel StickyPosterior::mean_model() const {
  HmmModel m;
  m.channels = channels;
  m.initial = initial;
  m.transitions = transitions;
  m.emissions = emissions;
  m.tied_covariance = false;
  return m;
}

Decoding decode(const StickyPosterior& posterior, const ConversationSeries& series) {
  const int K = posterior.k_max();
  Eigen::VectorXd li = posterior.initial.array().log();
  Eigen::MatrixXd lt = posterior.transitions.array().log();
  for (int k = 0; k < K; ++k)
    if (!posterior.support[std::size_t(k)]) {
      li[k] = kNegInf;
      lt.col(k).setConstant(kNegInf);
    }
  auto r = kernels::viterbi(emission_matrix(posterior.mean_model(), series), li, lt);
  return {LabelSequence(std::move(r.path)), r.log_prob};
}

StickyPosterior fit_sticky(const ConversationSeries& series, const StickyConfig& cfg,
                           const NiwPrior& prior) {
  if (series.size() == 0) throw Error(ErrorCode::EmptySeries, "cannot fit an empty series");
  Rng rng = seeded_rng(cfg.seed);
  SamplerState state = init_sampler(series, cfg, prior, rng);
  const int K = cfg.k_max;
  const std::size_t C = series.channels().size();

  StickyPosterior post;
  post.channels = series.channels();
  const int sweeps = cfg.burn_in + cfg.n_samples * cfg.thin;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    gibbs_sweep(state, series, cfg, prior, rng);
    post.loglik_trace.push_back(joint_loglik(state, series));
    const int kept = sweep - cfg.burn_in;
    if (kept >= 0 && (kept + 1) % cfg.thin == 0) post.samples.push_back(state);
  }

  // Posterior means, averaged directly over retained samples.
  const double n = double(post.samples.size());
  post.initial = Eigen::VectorXd::Zero(K);
  post.beta = Eigen::VectorXd::Zero(K);
  post.transitions = Eigen::MatrixXd::Zero(K, K);
  post.support.assign(std::size_t(K), false);
  std::vector<std::vector<Vec2>> mu(static_cast<std::size_t>(K), std::vector<Vec2>(C, Vec2::Zero()));
  std::vector<std::vector<Mat2>> sigma(static_cast<std::size_t>(K), std::vector<Mat2>(C, Mat2::Zero()));
  post.mean_hypers = {0.0, 0.0, 0.0};
  for (const auto& s : post.samples) {
    post.initial += s.initial / n;
    post.beta += s.beta / n;
    post.transitions += s.pi / n;
    post.mean_hypers.alpha += s.hypers.alpha / n;
    post.mean_hypers.kappa += s.hypers.kappa / n;
    post.mean_hypers.gamma += s.hypers.gamma / n;
    for (int zt : s.z) post.support[std::size_t(zt)] = true;
    for (int k = 0; k < K; ++k)
      for (std::size_t c = 0; c < C; ++c) {
        mu[std::size_t(k)][c] += s.emissions[std::size_t(k)][c].mean() / n;
        sigma[std::size_t(k)][c] += s.emissions[std::size_t(k)][c].covariance() / n;
      }
  }
  // Renormalize against summation rounding.
  post.initial /= post.initial.sum();
  post.beta /= post.beta.sum();
  for (int j = 0; j < K; ++j) post.transitions.row(j) /= post.transitions.row(j).sum();
  post.emissions.resize(std::size_t(K));
  for (int k = 0; k < K; ++k)
    for (std::size_t c = 0; c < C; ++c) {
      const Mat2 s = 0.5 * (sigma[std::size_t(k)][c] + sigma[std::size_t(k)][c].transpose());
      post.emissions[std::size_t(k)].emplace_back(mu[std::size_t(k)][c], s);
    }

  const auto raw = decode(post, series);

  // Renumber: states on the reported path first, each group by ascending valence.
  std::set<int> used(raw.labels.labels.begin(), raw.labels.labels.end());
  std::vector<int> order(static_cast<std::size_t>(K));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const bool ua = used.count(a) > 0, ub = used.count(b) > 0;
    if (ua != ub) return ua;
    return mean_valence(post.emissions[std::size_t(a)]) < mean_valence(post.emissions[std::size_t(b)]);
  });
  std::vector<int> inverse(static_cast<std::size_t>(K));
  for (int i = 0; i < K; ++i) inverse[std::size_t(order[std::size_t(i)])] = i;

  StickyPosterior out = post;
  for (int i = 0; i < K; ++i) {
    const int o = order[std::size_t(i)];
    out.initial[i] = post.initial[o];
    out.beta[i] = post.beta[o];
    out.emissions[std::size_t(i)] = post.emissions[std::size_t(o)];
    out.support[std::size_t(i)] = post.support[std::size_t(o)];
    for (int j = 0; j < K; ++j) out.transitions(i, j) = post.transitions(o, order[std::size_t(j)]);
  }
  for (auto& s : out.samples) s = permute(s, order);
  out.labels = raw.labels;
  for (auto& l : out.labels.labels) l = inverse[std::size_t(l)];
  out.path_log_prob = raw.path_log_prob;
  out.effective_k = int(used.size());
  return out;
}

}  // namespace regimes
