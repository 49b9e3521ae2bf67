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

#include "regimes/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "regimes/error.hpp"

namespace regimes {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::AlreadyStandardized: return "AlreadyStandardized";
    case ErrorCode::ChannelMismatch: return "ChannelMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::EmptyStateCollapse: return "EmptyStateCollapse";
    case ErrorCode::NumericalUnderflow: return "NumericalUnderflow";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonContiguousIndex: return "NonContiguousIndex";
    case ErrorCode::InconsistentChannels: return "InconsistentChannels";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::string_view modality_tag(Modality m) noexcept {
  switch (m) {
    case Modality::Text: return "txt";
    case Modality::Audio: return "aud";
    case Modality::Video: return "vid";
  }
  return "?";
}

std::optional<Modality> modality_from_tag(std::string_view tag) noexcept {
  for (auto m : kAllModalities)
    if (modality_tag(m) == tag) return m;
  return std::nullopt;
}

std::size_t ChannelSet::size() const noexcept {
  std::size_t n = 0;
  for (auto m : kAllModalities) n += contains(m) ? 1 : 0;
  return n;
}

std::vector<Modality> ChannelSet::modalities() const {
  std::vector<Modality> out;
  for (auto m : kAllModalities)
    if (contains(m)) out.push_back(m);
  return out;
}

std::string ChannelSet::to_string() const {
  std::string s = "{";
  for (auto m : modalities()) {
    if (s.size() > 1) s += ",";
    s += modality_tag(m);
  }
  return s + "}";
}

const VAPoint& Observation::at(Modality m) const {
  if (!channels_.contains(m))
    throw Error(ErrorCode::ChannelMismatch,
                "observation has no " + std::string(modality_tag(m)) + " channel");
  return values_[std::size_t(m)];
}

Eigen::VectorXd Observation::stacked() const {
  const auto ms = channels_.modalities();
  Eigen::VectorXd v(2 * Eigen::Index(ms.size()));
  for (std::size_t i = 0; i < ms.size(); ++i) {
    v[2 * i] = values_[std::size_t(ms[i])].valence;
    v[2 * i + 1] = values_[std::size_t(ms[i])].arousal;
  }
  return v;
}

ConversationSeries::ConversationSeries(std::string id, std::vector<Observation> observations,
                                       bool standardized)
    : id_(std::move(id)), observations_(std::move(observations)), standardized_(standardized) {
  if (observations_.empty()) throw Error(ErrorCode::EmptySeries, "series '" + id_ + "' is empty");
  channels_ = observations_.front().channels();
  if (channels_.empty())
    throw Error(ErrorCode::InconsistentChannels, "observation 0 has no channels");
  for (std::size_t t = 0; t < observations_.size(); ++t) {
    const auto& o = observations_[t];
    if (!(o.channels() == channels_))
      throw Error(ErrorCode::InconsistentChannels,
                  "observation " + std::to_string(t) + " has channels " + o.channels().to_string() +
                      ", expected " + channels_.to_string());
    for (auto m : channels_.modalities()) {
      const auto& p = o.at(m);
      if (!std::isfinite(p.valence) || !std::isfinite(p.arousal))
        throw Error(ErrorCode::NonFiniteValue,
                    "non-finite value at t=" + std::to_string(t) + " channel " +
                        std::string(modality_tag(m)));
    }
  }
}

ConversationSeries ConversationSeries::with_flag_cleared() const {
  ConversationSeries copy = *this;
  copy.standardized_ = false;
  return copy;
}

Eigen::MatrixXd ConversationSeries::stacked() const {
  const Eigen::Index dim = 2 * Eigen::Index(channels_.size());
  Eigen::MatrixXd x(Eigen::Index(size()), dim);
  for (std::size_t t = 0; t < size(); ++t) x.row(Eigen::Index(t)) = observations_[t].stacked();
  return x;
}

std::size_t LabelSequence::num_labels() const {
  return std::set<int>(labels.begin(), labels.end()).size();
}

int LabelSequence::max_label() const {
  int m = -1;
  for (int l : labels) m = std::max(m, l);
  return m;
}

GaussianEmission::GaussianEmission() : GaussianEmission(Vec2::Zero(), Mat2::Identity()) {}

GaussianEmission::GaussianEmission(const Vec2& mean, const Mat2& covariance)
    : mean_(mean), covariance_(covariance) {
  if (!mean.allFinite() || !covariance.allFinite())
    throw Error(ErrorCode::NonFiniteValue, "emission parameters must be finite");
  if (std::abs(covariance(0, 1) - covariance(1, 0)) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "emission covariance is not symmetric");
  const double det = covariance(0, 0) * covariance(1, 1) - covariance(0, 1) * covariance(1, 0);
  if (!(covariance(0, 0) > 0.0) || !(det > 0.0))
    throw Error(ErrorCode::InvalidArgument, "emission covariance is not positive definite");
  precision_ << covariance(1, 1) / det, -covariance(0, 1) / det, -covariance(1, 0) / det,
      covariance(0, 0) / det;
  log_norm_ = -std::log(2.0 * M_PI) - 0.5 * std::log(det);
}

double GaussianEmission::log_pdf(const Vec2& x) const noexcept {
  const Vec2 r = x - mean_;
  return log_norm_ - 0.5 * r.dot(precision_ * r);
}

ChannelMoments channel_moments(const std::vector<const ConversationSeries*>& corpus) {
  if (corpus.empty()) throw Error(ErrorCode::EmptySeries, "empty corpus");
  ChannelMoments m;
  m.channels = corpus.front()->channels();
  std::size_t n = 0;
  for (const auto* s : corpus) {
    if (!(s->channels() == m.channels))
      throw Error(ErrorCode::InconsistentChannels, "corpus series disagree on channel set");
    for (const auto& o : s->observations())
      for (auto mod : m.channels.modalities()) m.mean[std::size_t(mod)] += o.at(mod).vec();
    n += s->size();
  }
  if (n == 0) throw Error(ErrorCode::EmptySeries, "empty corpus");
  for (auto& v : m.mean) v /= double(n);
  for (const auto* s : corpus)
    for (const auto& o : s->observations())
      for (auto mod : m.channels.modalities()) {
        const Vec2 r = o.at(mod).vec() - m.mean[std::size_t(mod)];
        m.stddev[std::size_t(mod)] += r.cwiseProduct(r);
      }
  for (auto& v : m.stddev) v = (v / double(n)).cwiseSqrt();
  return m;
}

ConversationSeries standardize_with(const ConversationSeries& series, const ChannelMoments& m) {
  if (series.standardized())
    throw Error(ErrorCode::AlreadyStandardized, "series '" + series.id() + "' already standardized");
  if (series.size() == 0) throw Error(ErrorCode::EmptySeries, "empty series");
  if (!(series.channels() == m.channels))
    throw Error(ErrorCode::ChannelMismatch, "moments computed for a different channel set");
  auto z = [](double x, double mu, double sd) {
    // Constant dimension: everything sits at the mean.
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mu)))) return 0.0;
    return (x - mu) / sd;
  };
  std::vector<Observation> out;
  out.reserve(series.size());
  for (const auto& o : series.observations()) {
    Observation n;
    for (auto mod : m.channels.modalities()) {
      const auto i = std::size_t(mod);
      const auto& p = o.at(mod);
      n.set(mod, {z(p.valence, m.mean[i][0], m.stddev[i][0]),
                  z(p.arousal, m.mean[i][1], m.stddev[i][1])});
    }
    out.push_back(n);
  }
  return ConversationSeries(series.id(), std::move(out), true);
}

ConversationSeries standardize(const ConversationSeries& series) {
  if (series.standardized())
    throw Error(ErrorCode::AlreadyStandardized, "series '" + series.id() + "' already standardized");
  if (series.size() == 0) throw Error(ErrorCode::EmptySeries, "empty series");
  return standardize_with(series, channel_moments({&series}));
}

std::vector<ConversationSeries> standardize_corpus(const std::vector<ConversationSeries>& corpus) {
  std::vector<const ConversationSeries*> ptrs;
  for (const auto& s : corpus) ptrs.push_back(&s);
  const auto m = channel_moments(ptrs);
  std::vector<ConversationSeries> out;
  for (const auto& s : corpus) out.push_back(standardize_with(s, m));
  return out;
}

}  // namespace regimes
