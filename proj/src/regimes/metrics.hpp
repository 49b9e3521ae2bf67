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

#include <optional>
#include <span>
#include <vector>

#include "regimes/core.hpp"

namespace regimes {

struct Segment {
  int label = 0;
  std::size_t start = 0;  // inclusive
  std::size_t end = 0;    // inclusive

  std::size_t length() const noexcept { return end - start + 1; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

struct TemporalStats {
  double mean_regime_duration = 0.0;
  double single_utterance_fraction = 0.0;
  int regime_shifts = 0;
  int effective_regimes = 0;
  double dominant_regime_share = 0.0;
};

struct GeometryStats {
  double intra_regime_variance = 0.0;
  double inter_regime_centroid_distance = 0.0;
};

// Reference-dependent fields are empty when no reference was supplied.
// Count-like fields are real-valued so corpus means fit the same type.
struct MetricReport {
  std::optional<double> segment_f1;
  std::optional<double> boundary_f1;
  std::optional<double> nmi;
  std::optional<double> temporal_purity;
  double mean_regime_duration = 0.0;
  double single_utterance_fraction = 0.0;
  double regime_shifts = 0.0;
  double transition_entropy = 0.0;
  double intra_regime_variance = 0.0;
  double inter_regime_centroid_distance = 0.0;
  double effective_regimes = 0.0;
  double dominant_regime_share = 0.0;

  bool has_reference() const noexcept { return nmi.has_value(); }
};

std::vector<Segment> segments(const LabelSequence& labels);

TemporalStats temporal_stats(const LabelSequence& labels);

// Occupancy-weighted row entropy of the empirical bigram matrix, normalized by
// log(#distinct labels). Throws DegenerateInput for T < 2.
double transition_entropy(const LabelSequence& labels);

double temporal_purity(const LabelSequence& labels, const LabelSequence& ref);

// I(a;b) / sqrt(H(a) H(b)); 1 when both are constant, 0 when only one is.
double nmi(const LabelSequence& a, const LabelSequence& b);

// Exact (label, start, end) segment matches.
double segment_f1(const LabelSequence& pred_aligned, const LabelSequence& ref);

// Indices t with label_t != label_{t-1}.
std::vector<std::size_t> boundaries(const LabelSequence& labels);

// Greedy nearest-first one-to-one matching within |dt| <= tol.
double boundary_f1(const LabelSequence& pred, const LabelSequence& ref, int tol = 1);

GeometryStats geometry_stats(const LabelSequence& labels, const ConversationSeries& series);

MetricReport evaluate(const LabelSequence& pred, const std::optional<LabelSequence>& ref,
                      const ConversationSeries& series);

// Unweighted mean over conversations. A reference field is averaged over the
// reports that carry it.
MetricReport aggregate(std::span<const MetricReport> reports);

}  // namespace regimes
