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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace regimes {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Added to covariance diagonals whenever one is estimated or sampled.
inline constexpr double kCovarianceJitter = 1e-6;

struct VAPoint {
  double valence = 0.0;
  double arousal = 0.0;

  Vec2 vec() const { return {valence, arousal}; }
};

enum class Modality : std::uint8_t { Text = 0, Audio = 1, Video = 2 };

inline constexpr std::array<Modality, 3> kAllModalities = {Modality::Text, Modality::Audio,
                                                           Modality::Video};

// Short tag used in file formats: txt, aud, vid.
std::string_view modality_tag(Modality m) noexcept;
std::optional<Modality> modality_from_tag(std::string_view tag) noexcept;

// Set of modalities present in a series, kept in canonical Text < Audio < Video order.
class ChannelSet {
 public:
  ChannelSet() = default;
  ChannelSet(std::initializer_list<Modality> ms) {
    for (auto m : ms) insert(m);
  }

  void insert(Modality m) noexcept { bits_ |= bit(m); }
  bool contains(Modality m) const noexcept { return (bits_ & bit(m)) != 0; }
  bool empty() const noexcept { return bits_ == 0; }
  std::size_t size() const noexcept;
  std::vector<Modality> modalities() const;
  std::uint8_t bits() const noexcept { return bits_; }
  std::string to_string() const;

  friend bool operator==(ChannelSet a, ChannelSet b) noexcept { return a.bits_ == b.bits_; }

 private:
  static std::uint8_t bit(Modality m) noexcept { return std::uint8_t(1u << unsigned(m)); }
  std::uint8_t bits_ = 0;
};

class Observation {
 public:
  void set(Modality m, VAPoint p) {
    values_[std::size_t(m)] = p;
    channels_.insert(m);
  }
  const VAPoint& at(Modality m) const;
  ChannelSet channels() const noexcept { return channels_; }

  // Channels in canonical order, concatenated (valence, arousal) pairs.
  Eigen::VectorXd stacked() const;

 private:
  std::array<VAPoint, 3> values_{};
  ChannelSet channels_;
};

// One conversation: T utterance-level observations with a uniform channel set.
class ConversationSeries {
 public:
  ConversationSeries() = default;
  // Validates T >= 1, uniform channels, finite values.
  ConversationSeries(std::string id, std::vector<Observation> observations,
                     bool standardized = false);

  const std::string& id() const noexcept { return id_; }
  void set_id(std::string id) { id_ = std::move(id); }
  std::size_t size() const noexcept { return observations_.size(); }
  const Observation& operator[](std::size_t t) const { return observations_[t]; }
  const std::vector<Observation>& observations() const noexcept { return observations_; }
  ChannelSet channels() const noexcept { return channels_; }
  bool standardized() const noexcept { return standardized_; }

  // Copy with the standardized flag cleared; values untouched.
  ConversationSeries with_flag_cleared() const;

  // T x (2 * #channels) matrix of stacked channel vectors.
  Eigen::MatrixXd stacked() const;

 private:
  std::string id_;
  std::vector<Observation> observations_;
  ChannelSet channels_;
  bool standardized_ = false;
};

// Integer regime labels, one per utterance. Optional names keep the original
// strings a file used (index i <-> names[i]).
struct LabelSequence {
  std::vector<int> labels;
  std::vector<std::string> names;

  LabelSequence() = default;
  explicit LabelSequence(std::vector<int> l) : labels(std::move(l)) {}

  std::size_t size() const noexcept { return labels.size(); }
  int operator[](std::size_t t) const { return labels[t]; }
  std::size_t num_labels() const;
  int max_label() const;
};

class GaussianEmission {
 public:
  GaussianEmission();
  // Throws InvalidArgument unless covariance is symmetric (1e-12) and positive definite.
  GaussianEmission(const Vec2& mean, const Mat2& covariance);

  const Vec2& mean() const noexcept { return mean_; }
  const Mat2& covariance() const noexcept { return covariance_; }
  double log_pdf(const Vec2& x) const noexcept;

 private:
  Vec2 mean_;
  Mat2 covariance_;
  Mat2 precision_;
  double log_norm_ = 0.0;
};

// Mean/population-std statistics for each of the (up to 6) scalar channel dimensions.
struct ChannelMoments {
  ChannelSet channels;
  std::array<Vec2, 3> mean{Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
  std::array<Vec2, 3> stddev{Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
};

ChannelMoments channel_moments(const std::vector<const ConversationSeries*>& corpus);

// Z-scores every scalar channel dimension over t (population std). Constant
// dimensions map to zero.
ConversationSeries standardize(const ConversationSeries& series);

// Standardizes with externally supplied moments (corpus-wide mode).
ConversationSeries standardize_with(const ConversationSeries& series, const ChannelMoments& m);

std::vector<ConversationSeries> standardize_corpus(const std::vector<ConversationSeries>& corpus);

}  // namespace regimes
