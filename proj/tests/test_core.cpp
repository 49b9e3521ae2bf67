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

#include "regimes/core.hpp"
#include "regimes/error.hpp"
#include "support.hpp"

using namespace regimes;

namespace {

ConversationSeries two_channel(const std::vector<double>& v) {
  std::vector<Observation> obs(v.size());
  for (std::size_t t = 0; t < v.size(); ++t) {
    obs[t].set(Modality::Text, {v[t], 2.0 * v[t]});
    obs[t].set(Modality::Audio, {5.0, v[t] - 1.0});
  }
  return ConversationSeries("c", obs);
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("standardize uses population standard deviation") {
  const auto z = standardize(two_channel({1.0, 2.0, 3.0}));
  const double sigma = std::sqrt(2.0 / 3.0);
  const double expect[] = {-1.0 / sigma, 0.0, 1.0 / sigma};
  for (std::size_t t = 0; t < 3; ++t) {
    CHECK(z[t].at(Modality::Text).valence == doctest::Approx(expect[t]).epsilon(1e-12));
    CHECK(z[t].at(Modality::Text).arousal == doctest::Approx(expect[t]).epsilon(1e-12));
    CHECK(z[t].at(Modality::Audio).arousal == doctest::Approx(expect[t]).epsilon(1e-12));
  }
  CHECK(z[0].at(Modality::Text).valence == doctest::Approx(-1.2247).epsilon(1e-4));
  CHECK(z.standardized());
}

TEST_CASE("constant dimension maps to zeros") {
  const auto z = standardize(two_channel({1.0, 2.0, 3.0}));
  for (std::size_t t = 0; t < 3; ++t) CHECK(z[t].at(Modality::Audio).valence == 0.0);
  const auto c = standardize(testing::text_series({{5, 5}, {5, 5}, {5, 5}}));
  for (std::size_t t = 0; t < 3; ++t) {
    CHECK(c[t].at(Modality::Text).valence == 0.0);
    CHECK(c[t].at(Modality::Text).arousal == 0.0);
  }
}

TEST_CASE("standardizing twice is rejected") {
  const auto z = standardize(two_channel({1.0, 2.0, 3.0}));
  CHECK(code_of([&] { (void)standardize(z); }) == ErrorCode::AlreadyStandardized);
  CHECK_NOTHROW((void)standardize(z.with_flag_cleared()));
}

TEST_CASE("corpus standardization pools moments across conversations") {
  auto a = testing::text_series({{0, 0}, {2, 2}}, "a");
  auto b = testing::text_series({{4, 4}, {6, 6}}, "b");
  const auto z = standardize_corpus({a, b});
  // pooled mean 3, population std sqrt(5)
  CHECK(z[0][0].at(Modality::Text).valence == doctest::Approx(-3.0 / std::sqrt(5.0)));
  CHECK(z[1][1].at(Modality::Text).arousal == doctest::Approx(3.0 / std::sqrt(5.0)));
  CHECK(z[0].standardized());
  CHECK(z[1].id() == "b");
}

TEST_CASE("series construction validates its input") {
  CHECK(code_of([] { ConversationSeries("e", {}); }) == ErrorCode::EmptySeries);
  std::vector<Observation> mixed(2);
  mixed[0].set(Modality::Text, {0, 0});
  mixed[1].set(Modality::Audio, {0, 0});
  CHECK(code_of([&] { ConversationSeries("m", mixed); }) == ErrorCode::InconsistentChannels);
  std::vector<Observation> bad(1);
  bad[0].set(Modality::Text, {std::nan(""), 0});
  CHECK(code_of([&] { ConversationSeries("n", bad); }) == ErrorCode::NonFiniteValue);
  CHECK(code_of([] { Observation o; (void)o.at(Modality::Video); }) == ErrorCode::ChannelMismatch);
}

TEST_CASE("stacked layout follows canonical channel order") {
  Observation o;
  o.set(Modality::Video, {5, 6});
  o.set(Modality::Text, {1, 2});
  const auto v = o.stacked();
  REQUIRE(v.size() == 4);
  CHECK(v(0) == 1);
  CHECK(v(1) == 2);
  CHECK(v(2) == 5);
  CHECK(v(3) == 6);
  CHECK(o.channels().to_string() == "{txt,vid}");
}

TEST_CASE("modality tags round-trip") {
  for (auto m : kAllModalities) CHECK(modality_from_tag(modality_tag(m)) == m);
  CHECK_FALSE(modality_from_tag("xyz").has_value());
}

TEST_CASE("gaussian emission rejects invalid covariance") {
  Mat2 asym;
  asym << 1, 0.5, 0.2, 1;
  CHECK(code_of([&] { GaussianEmission(Vec2::Zero(), asym); }) == ErrorCode::InvalidArgument);
  Mat2 indef;
  indef << 1, 2, 2, 1;
  CHECK(code_of([&] { GaussianEmission(Vec2::Zero(), indef); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("gaussian log density matches the closed form") {
  testing::Gen g(11);
  for (int i = 0; i < 200; ++i) {
    const Vec2 mu(testing::unif(g, -3, 3), testing::unif(g, -3, 3));
    const Vec2 x(testing::unif(g, -3, 3), testing::unif(g, -3, 3));
    const Mat2 S = testing::random_spd(g);
    CHECK(GaussianEmission(mu, S).log_pdf(x) == doctest::Approx(testing::mvn2_logpdf(x, mu, S)).epsilon(1e-12));
  }
  CHECK(GaussianEmission(Vec2::Zero(), Mat2::Identity()).log_pdf(Vec2::Zero()) ==
        doctest::Approx(-1.8379).epsilon(1e-4));
}

TEST_CASE("label sequence counts") {
  const auto l = testing::labels({3, 3, 0, 7});
  CHECK(l.num_labels() == 3);
  CHECK(l.max_label() == 7);
}

TEST_CASE("channel moments start from zero for every modality") {
  std::vector<Observation> obs(4);
  for (std::size_t t = 0; t < 4; ++t) {
    obs[t].set(Modality::Text, {double(t), 1.0});
    obs[t].set(Modality::Video, {-double(t), 3.0 * double(t)});
  }
  const ConversationSeries s("m", obs);
  for (int rep = 0; rep < 3; ++rep) {
    const auto m = channel_moments({&s});
    CHECK(m.mean[0](0) == doctest::Approx(1.5));
    CHECK(m.mean[0](1) == doctest::Approx(1.0));
    CHECK(m.mean[2](0) == doctest::Approx(-1.5));
    CHECK(m.mean[2](1) == doctest::Approx(4.5));
    CHECK(m.stddev[0](0) == doctest::Approx(std::sqrt(1.25)));
    CHECK(m.stddev[0](1) == 0.0);
    CHECK(m.stddev[2](1) == doctest::Approx(3.0 * std::sqrt(1.25)));
  }
}
