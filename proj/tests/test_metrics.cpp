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

#include <cmath>
#include <map>

#include "regimes/alignment.hpp"
#include "regimes/error.hpp"
#include "regimes/metrics.hpp"
#include "support.hpp"

using namespace regimes;
using testing::labels;

namespace {

// Contingency-table NMI with the geometric mean of the entropies.
double oracle_nmi(const std::vector<int>& a, const std::vector<int>& b) {
  const double n = double(a.size());
  std::map<int, double> pa, pb;
  std::map<std::pair<int, int>, double> pab;
  for (std::size_t t = 0; t < a.size(); ++t) {
    pa[a[t]] += 1.0 / n;
    pb[b[t]] += 1.0 / n;
    pab[{a[t], b[t]}] += 1.0 / n;
  }
  double ha = 0, hb = 0, mi = 0;
  for (auto [_, p] : pa) ha -= p * std::log(p);
  for (auto [_, p] : pb) hb -= p * std::log(p);
  for (auto [k, p] : pab) mi += p * std::log(p / (pa[k.first] * pb[k.second]));
  if (pa.size() == 1 && pb.size() == 1) return 1.0;
  if (pa.size() == 1 || pb.size() == 1) return 0.0;
  return mi / std::sqrt(ha * hb);
}

std::vector<int> random_labels(testing::Gen& g, std::size_t T, int K, double stay) {
  std::vector<int> v(T);
  v[0] = testing::unif_int(g, 0, K - 1);
  for (std::size_t t = 1; t < T; ++t) v[t] = testing::unif(g) < stay ? v[t - 1] : testing::unif_int(g, 0, K - 1);
  return v;
}

}  // namespace

TEST_CASE("segments") {
  CHECK(segments(labels({0, 0, 1, 1, 1, 0})) == std::vector<Segment>{{0, 0, 1}, {1, 2, 4}, {0, 5, 5}});
  CHECK(segments(labels({2})) == std::vector<Segment>{{2, 0, 0}});
  CHECK(segments(labels({0, 1, 2})) == std::vector<Segment>{{0, 0, 0}, {1, 1, 1}, {2, 2, 2}});
  CHECK_THROWS_AS(segments(labels({})), Error);
}

TEST_CASE("temporal statistics") {
  auto s = temporal_stats(labels(std::vector<int>(10, 3)));
  CHECK(s.mean_regime_duration == 10.0);
  CHECK(s.single_utterance_fraction == 0.0);
  CHECK(s.regime_shifts == 0);
  CHECK(s.effective_regimes == 1);
  CHECK(s.dominant_regime_share == 1.0);
  s = temporal_stats(labels({0, 1, 0, 1}));
  CHECK(s.mean_regime_duration == 1.0);
  CHECK(s.single_utterance_fraction == 1.0);
  CHECK(s.regime_shifts == 3);
  CHECK(s.effective_regimes == 2);
  CHECK(s.dominant_regime_share == 0.5);
  s = temporal_stats(labels({0, 0, 1, 1, 1, 0}));
  CHECK(s.mean_regime_duration == 2.0);
  CHECK(s.single_utterance_fraction == doctest::Approx(1.0 / 3.0));
  CHECK(s.regime_shifts == 2);
  CHECK(s.effective_regimes == 2);
  CHECK(s.dominant_regime_share == 0.5);
}

TEST_CASE("transition entropy") {
  CHECK(transition_entropy(labels(std::vector<int>(8, 1))) == 0.0);
  CHECK(transition_entropy(labels({0, 1, 0, 1, 0, 1})) == 0.0);
  testing::Gen g(601);
  std::vector<int> v(10000);
  for (auto& x : v) x = testing::unif_int(g, 0, 1);
  CHECK(std::abs(transition_entropy(labels(v)) - 1.0) < 0.05);
  // rows: 0 -> {0: 1, 1: 1}, 1 -> {1: 1}; weights 2/3, 1/3
  CHECK(transition_entropy(labels({0, 0, 1, 1})) == doctest::Approx((2.0 / 3.0) * std::log(2.0) / std::log(2.0)));
}

TEST_CASE("temporal purity") {
  CHECK(temporal_purity(labels({0, 0, 1, 1}), labels({1, 1, 0, 0})) == 1.0);
  CHECK(temporal_purity(labels({0, 0, 0, 0}), labels({0, 0, 1, 1})) == 0.5);
  CHECK(temporal_purity(labels({0, 0, 0, 1, 1, 1}), labels({0, 0, 1, 1, 1, 1})) == doctest::Approx(5.0 / 6.0));
}

TEST_CASE("normalized mutual information") {
  CHECK(nmi(labels({0, 1, 1, 2}), labels({0, 1, 1, 2})) == doctest::Approx(1.0));
  CHECK(nmi(labels({0, 0, 1, 1}), labels({1, 1, 0, 0})) == doctest::Approx(1.0));
  CHECK(nmi(labels({0, 0, 1, 1}), labels({0, 1, 0, 1})) == doctest::Approx(0.0));
  CHECK(nmi(labels({0, 0, 0}), labels({1, 1, 1})) == 1.0);
  CHECK(nmi(labels({0, 0, 0}), labels({0, 1, 1})) == 0.0);
}

TEST_CASE("segment F1") {
  CHECK(segment_f1(labels({0, 0, 1, 2}), labels({0, 0, 1, 2})) == 1.0);
  CHECK(segment_f1(labels({0, 0, 1, 1, 1, 1}), labels({0, 0, 0, 0, 1, 1})) == 0.0);
  // pred (0,0,1),(1,2,3) vs ref (0,0,1),(1,2,2),(0,3,3)
  CHECK(segment_f1(labels({0, 0, 1, 1}), labels({0, 0, 1, 0})) == doctest::Approx(0.4));
}

TEST_CASE("boundary F1") {
  CHECK(boundary_f1(labels({0, 0, 1, 1}), labels({0, 0, 1, 1})) == 1.0);
  std::vector<int> p(10, 0), r(10, 0);
  for (int t = 5; t < 10; ++t) p[std::size_t(t)] = 1;
  for (int t = 6; t < 10; ++t) r[std::size_t(t)] = 1;
  CHECK(boundary_f1(labels(p), labels(r), 1) == 1.0);
  CHECK(boundary_f1(labels(p), labels(r), 0) == 0.0);
  // pred boundaries {3, 7}, ref {4, 9}
  const auto pred = labels({0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0});
  const auto ref = labels({0, 0, 0, 0, 1, 1, 1, 1, 1, 0, 0});
  CHECK(boundaries(pred) == std::vector<std::size_t>{3, 7});
  CHECK(boundaries(ref) == std::vector<std::size_t>{4, 9});
  CHECK(boundary_f1(pred, ref, 1) == doctest::Approx(0.5));
  CHECK(boundary_f1(labels({0, 0}), labels({1, 1})) == 1.0);
  CHECK(boundary_f1(labels({0, 0}), labels({0, 1})) == 0.0);
}

TEST_CASE("geometry statistics") {
  CHECK(geometry_stats(labels({0, 0}), testing::text_series({{0, 0}, {1, 1}})).inter_regime_centroid_distance == 0.0);
  const auto two = geometry_stats(labels({0, 1}), testing::text_series({{0, 0}, {3, 4}}));
  CHECK(two.inter_regime_centroid_distance == doctest::Approx(5.0));
  CHECK(two.intra_regime_variance == 0.0);
  const auto six = geometry_stats(labels({0, 0, 0, 1, 1, 1}),
                                  testing::text_series({{0, 0}, {2, 0}, {1, 3}, {10, 0}, {12, 0}, {11, 3}}));
  // centroids (1, 1) and (11, 1); squared deviations 2 + 2 + 4 per cluster
  CHECK(six.intra_regime_variance == doctest::Approx(16.0 / 6.0));
  CHECK(six.inter_regime_centroid_distance == doctest::Approx(10.0));
}

TEST_CASE("evaluation with and without a reference") {
  testing::Gen g(602);
  const auto series = testing::random_series(g, 8, {Modality::Text, Modality::Audio});
  const auto l = labels({0, 0, 1, 1, 1, 2, 2, 0});
  const auto full = evaluate(l, l, series);
  CHECK(*full.segment_f1 == 1.0);
  CHECK(*full.boundary_f1 == 1.0);
  CHECK(*full.nmi == doctest::Approx(1.0));
  CHECK(*full.temporal_purity == 1.0);
  const auto bare = evaluate(l, std::nullopt, series);
  CHECK_FALSE(bare.has_reference());
  CHECK_FALSE(bare.segment_f1.has_value());
  CHECK(bare.mean_regime_duration == doctest::Approx(2.0));
  CHECK(bare.regime_shifts == 3.0);
  CHECK_THROWS_AS(evaluate(labels({0, 1}), std::nullopt, series), Error);
}

TEST_CASE("corpus aggregation is an unweighted mean") {
  MetricReport a, b;
  a.nmi = 0.2;
  b.nmi = 0.6;
  a.mean_regime_duration = 3.0;
  b.mean_regime_duration = 9.0;
  a.regime_shifts = 4.0;
  b.regime_shifts = 1.0;
  a.dominant_regime_share = 0.5;
  b.dominant_regime_share = 1.0;
  const std::vector<MetricReport> v{a, b};
  const auto m = aggregate(v);
  CHECK(*m.nmi == doctest::Approx(0.4));
  CHECK(m.mean_regime_duration == doctest::Approx(6.0));
  CHECK(m.regime_shifts == doctest::Approx(2.5));
  CHECK(m.dominant_regime_share == doctest::Approx(0.75));
  CHECK_FALSE(m.segment_f1.has_value());
}

TEST_CASE("metric properties on random inputs") {
  testing::Gen g(603);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto T = std::size_t(testing::unif_int(g, 2, 40));
    const double stay = testing::unif(g);
    const auto a = random_labels(g, T, testing::unif_int(g, 1, 5), stay);
    const auto b = random_labels(g, T, testing::unif_int(g, 1, 5), stay);
    const auto la = labels(a), lb = labels(b);

    const double n_ab = nmi(la, lb);
    CHECK(n_ab == doctest::Approx(oracle_nmi(a, b)).epsilon(1e-10));
    CHECK(std::abs(n_ab - nmi(lb, la)) <= 1e-12);
    std::vector<int> perm = {3, 0, 4, 1, 2};
    auto relabeled = a;
    for (auto& x : relabeled) x = perm[std::size_t(x)] + 7;
    CHECK(std::abs(nmi(labels(relabeled), lb) - n_ab) <= 1e-12);
    CHECK(n_ab >= 0.0);
    CHECK(n_ab <= 1.0);

    double prev = -1.0;
    for (int tol = 0; tol <= 5; ++tol) {
      const double f = boundary_f1(la, lb, tol);
      CHECK(f >= prev);
      CHECK(f >= 0.0);
      CHECK(f <= 1.0);
      prev = f;
    }

    const auto ts = temporal_stats(la);
    CHECK(ts.mean_regime_duration * (ts.regime_shifts + 1) == doctest::Approx(double(T)).epsilon(1e-12));
    const double te = transition_entropy(la);
    CHECK(te >= 0.0);
    CHECK(te <= 1.0 + 1e-12);
    const double pur = temporal_purity(la, lb);
    CHECK(pur >= 0.0);
    CHECK(pur <= 1.0);
    const double sf = segment_f1(align(la, lb), lb);
    CHECK(sf >= 0.0);
    CHECK(sf <= 1.0);
    CHECK(sf <= boundary_f1(la, lb, 0) + 1e-12);
  }
}
