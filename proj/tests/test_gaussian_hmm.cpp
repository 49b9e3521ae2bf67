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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "regimes/error.hpp"
#include "regimes/gaussian_hmm.hpp"
#include "support.hpp"

using namespace regimes;

namespace {

HmmModel unit_model(ChannelSet cs, std::vector<std::vector<Vec2>> means) {
  HmmModel m;
  m.channels = cs;
  const int K = int(means.size());
  m.initial = Eigen::VectorXd::Constant(K, 1.0 / K);
  m.transitions = Eigen::MatrixXd::Constant(K, K, 1.0 / K);
  for (const auto& row : means) {
    std::vector<GaussianEmission> e;
    for (const auto& mu : row) e.emplace_back(mu, Mat2::Identity());
    m.emissions.push_back(e);
  }
  return m;
}

// Two-state chain with means 4 apart in valence on one channel.
ConversationSeries two_state_data(testing::Gen& g, std::size_t T, std::vector<int>& truth) {
  const double mu[2][2] = {{0.0, 0.0}, {4.0, 0.0}};
  std::vector<Observation> obs(T);
  truth.assign(T, 0);
  int z = testing::unif_int(g, 0, 1);
  for (std::size_t t = 0; t < T; ++t) {
    if (t > 0 && testing::unif(g) < 0.1) z = 1 - z;
    truth[t] = z;
    obs[t].set(Modality::Text, {mu[z][0] + testing::gauss(g), mu[z][1] + testing::gauss(g)});
  }
  return ConversationSeries("two", obs);
}

}  // namespace

TEST_CASE("emission log likelihood at the mean") {
  const auto one = unit_model({Modality::Text}, {{Vec2(1, 2)}});
  Observation o;
  o.set(Modality::Text, {1, 2});
  CHECK(emission_loglik(one, o, 0) == doctest::Approx(std::log(1.0 / (2.0 * std::numbers::pi))).epsilon(1e-12));
  CHECK(emission_loglik(one, o, 0) == doctest::Approx(-1.8379).epsilon(1e-4));
  const auto two = unit_model({Modality::Text, Modality::Audio}, {{Vec2(1, 2), Vec2(-1, 0)}});
  o.set(Modality::Audio, {-1, 0});
  CHECK(emission_loglik(two, o, 0) == doctest::Approx(2.0 * std::log(1.0 / (2.0 * std::numbers::pi))).epsilon(1e-12));
}

TEST_CASE("emission log likelihood matches a hand quadratic form") {
  HmmModel m = unit_model({Modality::Text}, {{Vec2(1, -1)}});
  Mat2 S;
  S << 2.0, 0.5, 0.5, 1.0;
  m.emissions[0][0] = GaussianEmission(Vec2(1, -1), S);
  Observation o;
  o.set(Modality::Text, {2, 1});
  // det = 1.75; d = (1, 2); S^{-1} = [[1, -0.5], [-0.5, 2]] / 1.75; q = (1 - 2 + 8) / 1.75 = 4
  const double expect = -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(1.75) - 0.5 * 4.0;
  CHECK(emission_loglik(m, o, 0) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("single state likelihood is a sum of emissions") {
  testing::Gen g(201);
  const auto cs = testing::random_channels(g, 2);
  const auto m = testing::random_model(g, 1, cs);
  const auto s = testing::random_series(g, 30, cs);
  double sum = 0.0;
  for (std::size_t t = 0; t < s.size(); ++t) sum += testing::oracle_emission(m, s[t], 0);
  CHECK(forward_loglik(m, s) == doctest::Approx(sum).epsilon(1e-12));
  const auto d = viterbi(m, s);
  CHECK(d.labels.labels == std::vector<int>(30, 0));
}

TEST_CASE("two states over six steps match all 64 paths") {
  testing::Gen g(202);
  for (int i = 0; i < 20; ++i) {
    const auto cs = testing::random_channels(g, 2);
    const auto m = testing::random_model(g, 2, cs, true);
    const auto s = testing::random_series(g, 6, cs);
    const auto bf = testing::brute_force(m, s);
    CHECK(forward_loglik(m, s) == doctest::Approx(bf.log_likelihood).epsilon(1e-9));
    const auto d = viterbi(m, s);
    CHECK(d.labels.labels == bf.best_path);
    CHECK(d.path_log_prob == doctest::Approx(bf.best_log_prob).epsilon(1e-9));
  }
}

TEST_CASE("absorbing chain decodes to its start state") {
  testing::Gen g(203);
  const auto cs = testing::random_channels(g, 1);
  auto m = testing::random_model(g, 2, cs);
  m.transitions = Eigen::MatrixXd::Identity(2, 2);
  m.initial << 0.0, 1.0;
  const auto s = testing::random_series(g, 10, cs);
  CHECK(viterbi(m, s).labels.labels == std::vector<int>(10, 1));
  CHECK(forward_loglik(m, s) == doctest::Approx(testing::oracle_path_logprob(m, s, std::vector<int>(10, 1))));
}

TEST_CASE("one state EM gives the sample moments") {
  testing::Gen g(204);
  const auto cs = testing::random_channels(g, 2);
  const auto s = testing::random_series(g, 40, cs);
  EmConfig cfg;
  cfg.num_states = 1;
  const auto fit = fit_em(s, cfg);
  const auto mods = cs.modalities();
  for (std::size_t c = 0; c < mods.size(); ++c) {
    Vec2 mean = Vec2::Zero();
    for (std::size_t t = 0; t < s.size(); ++t) mean += s[t].at(mods[c]).vec();
    mean /= double(s.size());
    Mat2 cov = Mat2::Zero();
    for (std::size_t t = 0; t < s.size(); ++t) {
      const Vec2 r = s[t].at(mods[c]).vec() - mean;
      cov += r * r.transpose();
    }
    cov /= double(s.size());
    cov += kCovarianceJitter * Mat2::Identity();
    CHECK((fit.model.emissions[0][c].mean() - mean).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((fit.model.emissions[0][c].covariance() - cov).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("EM log likelihood never decreases") {
  testing::Gen g(205);
  for (int i = 0; i < 30; ++i) {
    const auto cs = testing::random_channels(g, testing::unif_int(g, 1, 3));
    const auto s = testing::random_series(g, std::size_t(testing::unif_int(g, 10, 60)), cs);
    EmConfig cfg;
    cfg.num_states = testing::unif_int(g, 2, 4);
    cfg.n_restarts = 2;
    cfg.seed = std::uint64_t(i);
    cfg.tied_covariance = i % 2 == 0;
    try {
      const auto fit = fit_em(s, cfg);
      for (const auto& run : fit.runs)
        for (std::size_t it = 1; it < run.trace.size(); ++it) CHECK(run.trace[it] >= run.trace[it - 1] - 1e-8);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyStateCollapse);
    }
  }
}

TEST_CASE("EM recovers well separated means") {
  std::vector<double> errors;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    testing::Gen g(300 + seed);
    std::vector<int> truth;
    const auto s = two_state_data(g, 500, truth);
    EmConfig cfg;
    cfg.num_states = 2;
    cfg.seed = seed;
    const auto fit = fit_em(s, cfg);
    const Vec2 a = fit.model.emissions[0][0].mean(), b = fit.model.emissions[1][0].mean();
    const Vec2 m0(0, 0), m1(4, 0);
    const double straight = std::max((a - m0).norm(), (b - m1).norm());
    const double swapped = std::max((a - m1).norm(), (b - m0).norm());
    errors.push_back(std::min(straight, swapped));
  }
  std::sort(errors.begin(), errors.end());
  CHECK(0.5 * (errors[4] + errors[5]) < 0.2);
}

TEST_CASE("EM initial transitions are sticky and stochastic") {
  testing::Gen g(206);
  const auto cs = testing::random_channels(g, 1);
  const auto s = testing::random_series(g, 30, cs);
  const std::vector<ConversationSeries> v{s};
  EmConfig cfg;
  Rng rng(1);
  const auto m = initial_model(v, cfg, rng);
  CHECK(m.transitions(0, 0) == doctest::Approx(0.8 + 0.2 / 4));
  CHECK(m.transitions(0, 1) == doctest::Approx(0.2 / 4));
  CHECK_NOTHROW(m.validate());
}

TEST_CASE("splitting a state preserves the likelihood") {
  testing::Gen g(207);
  for (int i = 0; i < 10; ++i) {
    const auto cs = testing::random_channels(g, 2);
    const auto m = testing::random_model(g, 3, cs, true);
    const auto s = testing::random_series(g, 20, cs);
    const auto split = split_state(m, testing::unif_int(g, 0, 2));
    CHECK_NOTHROW(split.validate());
    CHECK(split.num_states() == 4);
    CHECK(forward_loglik(split, s) == doctest::Approx(forward_loglik(m, s)).epsilon(1e-10));
  }
}

TEST_CASE("permuting states preserves the likelihood and relabels the path") {
  testing::Gen g(208);
  const auto cs = testing::random_channels(g, 2);
  const auto m = testing::random_model(g, 3, cs);
  const auto s = testing::random_series(g, 20, cs);
  const std::vector<int> order = {2, 0, 1};
  const auto p = permute_states(m, order);
  CHECK(forward_loglik(p, s) == doctest::Approx(forward_loglik(m, s)).epsilon(1e-10));
  const auto a = viterbi(m, s).labels.labels, b = viterbi(p, s).labels.labels;
  for (std::size_t t = 0; t < a.size(); ++t) CHECK(order[std::size_t(b[t])] == a[t]);
}

TEST_CASE("EM rejects bad input") {
  testing::Gen g(209);
  const auto s = testing::random_series(g, 1, testing::random_channels(g, 1));
  EmConfig cfg;
  CHECK_THROWS_AS(fit_em(s, cfg), Error);
  cfg.num_states = 0;
  CHECK_THROWS_AS(fit_em(testing::random_series(g, 10, s.channels()), cfg), Error);
  const std::vector<ConversationSeries> mixed{testing::random_series(g, 10, {Modality::Text}),
                                              testing::random_series(g, 10, {Modality::Audio})};
  CHECK_THROWS_AS(fit_em(mixed, EmConfig{}), Error);
}

TEST_CASE("EM is deterministic under a seed") {
  testing::Gen g(210);
  const auto s = testing::random_series(g, 50, testing::random_channels(g, 2));
  EmConfig cfg;
  cfg.seed = 17;
  const auto a = fit_em(s, cfg), b = fit_em(s, cfg);
  CHECK(a.log_likelihood == b.log_likelihood);
  CHECK(viterbi(a.model, s).labels.labels == viterbi(b.model, s).labels.labels);
}
