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
#include <string>
#include <vector>

#include "regimes/core.hpp"
#include "regimes/gaussian_hmm.hpp"
#include "regimes/metrics.hpp"

namespace regimes {

// --- K sweep ---------------------------------------------------------------

struct SweepRow {
  int k = 0;
  double log_likelihood = 0.0;       // mean over conversations of the best fit
  double mean_regime_duration = 0.0;
  double transition_entropy = 0.0;
};

// Gaussian-HMM fits for every K in [k_min, k_max]. Besides the random
// restarts, each K > k_min also runs EM from the previous K's best model with
// its most occupied state split in two, so the best log-likelihood cannot
// fall as K grows.
std::vector<SweepRow> sweep_k(std::span<const ConversationSeries> series, int k_min, int k_max,
                              const EmConfig& base);
std::string format_sweep_csv(const std::vector<SweepRow>& rows);

// --- paired comparison -----------------------------------------------------

enum class Direction { HigherBetter, LowerBetter, None };

struct MetricComparison {
  std::string metric;
  Direction direction = Direction::None;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double mean_diff = 0.0;  // mean of (a - b)
  int a_wins = 0;          // for Direction::None: a > b
  int b_wins = 0;
  int ties = 0;
};

// Reports are paired by position. Reference metrics appear only when every
// report on both sides carries them.
std::vector<MetricComparison> compare_reports(std::span<const MetricReport> a,
                                              std::span<const MetricReport> b);
std::string format_comparison_csv(const std::vector<MetricComparison>& rows);

// --- regime summary block --------------------------------------------------

enum class Phase { HistoryTaking, AssessmentManagement };

struct RegimeSummary {
  Phase phase = Phase::HistoryTaking;
  std::string regime_label;  // R{rank}, ranks ascending in valence
  double valence = 0.0;
  double arousal = 0.0;
  int persistence_turns = 0;
  bool stable = false;  // persistence_turns > 5
  int shifts_so_far = 0;
};

// Summary of the regime active at `query` (default: T / 2). Valence and
// arousal are the state's emission means averaged over modalities.
RegimeSummary summarize(const LabelSequence& labels, const HmmModel& model,
                        std::optional<std::size_t> query = std::nullopt);

std::string format_summary(const RegimeSummary& summary);

}  // namespace regimes
