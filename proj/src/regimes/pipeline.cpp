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

#include "regimes/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "regimes/error.hpp"

namespace regimes {
namespace {

int most_occupied(const LabelSequence& labels, int K) {
  std::vector<int> counts(static_cast<std::size_t>(K), 0);
  for (int l : labels.labels) ++counts[std::size_t(l)];
  return int(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

std::string fmt(double v, const char* spec = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string fixed2(double v) {
  std::string s = fmt(v, "%.2f");
  if (s == "-0.00") s = "0.00";
  return s;
}

double mean_of(const std::vector<GaussianEmission>& per_channel, int dim) {
  double s = 0.0;
  for (const auto& e : per_channel) s += e.mean()[dim];
  return s / double(per_channel.size());
}

}  // namespace

std::vector<SweepRow> sweep_k(std::span<const ConversationSeries> series, int k_min, int k_max,
                              const EmConfig& base) {
  if (k_min < 1 || k_max < k_min)
    throw Error(ErrorCode::InvalidArgument,
                "invalid K range [" + std::to_string(k_min) + ", " + std::to_string(k_max) + "]");
  if (series.empty()) throw Error(ErrorCode::EmptySeries, "nothing to sweep");
  std::vector<SweepRow> rows;
  for (int k = k_min; k <= k_max; ++k) rows.push_back({k, 0.0, 0.0, 0.0});
  const double n = double(series.size());

  for (const auto& s : series) {
    std::optional<HmmModel> previous;
    std::optional<LabelSequence> previous_path;
    for (int k = k_min; k <= k_max; ++k) {
      EmConfig cfg = base;
      cfg.num_states = k;
      auto fit = fit_em(s, cfg);
      HmmModel best = fit.model;
      double best_ll = fit.log_likelihood;
      if (previous) {
        try {
          const auto warm = run_em(std::span<const ConversationSeries>(&s, 1),
                                   split_state(*previous, most_occupied(*previous_path, k - 1)), cfg);
          if (warm.log_likelihood > best_ll) {
            best = warm.model;
            best_ll = warm.log_likelihood;
          }
        } catch (const Error& e) {
          if (e.code() != ErrorCode::EmptyStateCollapse) throw;
        }
      }
      const auto path = viterbi(best, s).labels;
      auto& row = rows[std::size_t(k - k_min)];
      row.log_likelihood += best_ll / n;
      row.mean_regime_duration += temporal_stats(path).mean_regime_duration / n;
      row.transition_entropy += (path.size() >= 2 ? transition_entropy(path) : 0.0) / n;
      previous = std::move(best);
      previous_path = path;
    }
  }
  return rows;
}

std::string format_sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "k,log_likelihood,mean_regime_duration,transition_entropy\n";
  for (const auto& r : rows)
    out += std::to_string(r.k) + "," + fmt(r.log_likelihood) + "," + fmt(r.mean_regime_duration) +
           "," + fmt(r.transition_entropy) + "\n";
  return out;
}

std::vector<MetricComparison> compare_reports(std::span<const MetricReport> a,
                                              std::span<const MetricReport> b) {
  if (a.size() != b.size() || a.empty())
    throw Error(ErrorCode::LengthMismatch, "comparison needs two equally sized, non-empty corpora");
  struct Spec {
    const char* name;
    Direction dir;
    std::optional<double> MetricReport::*opt;
    double MetricReport::*val;
  };
  const std::vector<Spec> specs = {
      {"segment_f1", Direction::HigherBetter, &MetricReport::segment_f1, nullptr},
      {"boundary_f1", Direction::HigherBetter, &MetricReport::boundary_f1, nullptr},
      {"nmi", Direction::HigherBetter, &MetricReport::nmi, nullptr},
      {"mean_regime_duration", Direction::HigherBetter, nullptr, &MetricReport::mean_regime_duration},
      {"single_utterance_fraction", Direction::LowerBetter, nullptr, &MetricReport::single_utterance_fraction},
      {"regime_shifts", Direction::LowerBetter, nullptr, &MetricReport::regime_shifts},
      {"temporal_purity", Direction::HigherBetter, &MetricReport::temporal_purity, nullptr},
      {"transition_entropy", Direction::LowerBetter, nullptr, &MetricReport::transition_entropy},
      {"intra_regime_variance", Direction::None, nullptr, &MetricReport::intra_regime_variance},
      {"inter_regime_centroid_distance", Direction::None, nullptr, &MetricReport::inter_regime_centroid_distance},
      {"effective_regimes", Direction::None, nullptr, &MetricReport::effective_regimes},
      {"dominant_regime_share", Direction::None, nullptr, &MetricReport::dominant_regime_share},
  };
  std::vector<MetricComparison> out;
  const double n = double(a.size());
  for (const auto& spec : specs) {
    auto get = [&](const MetricReport& r) -> std::optional<double> {
      if (spec.opt) return r.*spec.opt;
      return r.*spec.val;
    };
    bool complete = true;
    for (std::size_t i = 0; i < a.size(); ++i) complete = complete && get(a[i]) && get(b[i]);
    if (!complete) continue;
    MetricComparison c;
    c.metric = spec.name;
    c.direction = spec.dir;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double va = *get(a[i]), vb = *get(b[i]);
      c.mean_a += va / n;
      c.mean_b += vb / n;
      c.mean_diff += (va - vb) / n;
      if (std::abs(va - vb) <= 1e-12) {
        ++c.ties;
      } else if ((va > vb) == (spec.dir != Direction::LowerBetter)) {
        ++c.a_wins;
      } else {
        ++c.b_wins;
      }
    }
    out.push_back(c);
  }
  return out;
}

std::string format_comparison_csv(const std::vector<MetricComparison>& rows) {
  std::string out = "metric,direction,mean_a,mean_b,mean_diff,a_wins,b_wins,ties\n";
  for (const auto& r : rows) {
    const char* dir = r.direction == Direction::HigherBetter  ? "higher"
                      : r.direction == Direction::LowerBetter ? "lower"
                                                              : "none";
    out += r.metric + "," + dir + "," + fmt(r.mean_a) + "," + fmt(r.mean_b) + "," +
           fmt(r.mean_diff) + "," + std::to_string(r.a_wins) + "," + std::to_string(r.b_wins) +
           "," + std::to_string(r.ties) + "\n";
  }
  return out;
}

RegimeSummary summarize(const LabelSequence& labels, const HmmModel& model,
                        std::optional<std::size_t> query) {
  const std::size_t T = labels.size();
  if (T == 0) throw Error(ErrorCode::EmptySeries, "no labels to summarize");
  const std::size_t q = query.value_or(T / 2);
  if (q >= T)
    throw Error(ErrorCode::InvalidArgument,
                "query index " + std::to_string(q) + " out of range for T=" + std::to_string(T));
  for (int l : labels.labels)
    if (l < 0 || l >= model.num_states())
      throw Error(ErrorCode::InvalidArgument, "label " + std::to_string(l) + " has no model state");

  RegimeSummary s;
  s.phase = 10 * q < 6 * T ? Phase::HistoryTaking : Phase::AssessmentManagement;
  const int current = labels[q];
  std::size_t start = q;
  while (start > 0 && labels[start - 1] == current) --start;
  s.persistence_turns = int(q - start + 1);
  s.stable = s.persistence_turns > 5;
  for (std::size_t t = 1; t <= q; ++t) s.shifts_so_far += labels[t] != labels[t - 1] ? 1 : 0;

  // Rank of the current state among the decoded states by mean valence.
  std::set<int> used(labels.labels.begin(), labels.labels.end());
  std::vector<int> ordered(used.begin(), used.end());
  std::stable_sort(ordered.begin(), ordered.end(), [&](int a, int b) {
    return mean_of(model.emissions[std::size_t(a)], 0) < mean_of(model.emissions[std::size_t(b)], 0);
  });
  const auto rank = std::find(ordered.begin(), ordered.end(), current) - ordered.begin();
  s.regime_label = "R" + std::to_string(rank);
  s.valence = mean_of(model.emissions[std::size_t(current)], 0);
  s.arousal = mean_of(model.emissions[std::size_t(current)], 1);
  return s;
}

std::string format_summary(const RegimeSummary& s) {
  std::string out = "[Emotional Regime Summary]\n";
  out += "Consultation phase: ";
  out += s.phase == Phase::HistoryTaking ? "history-taking" : "assessment/management";
  out += "\n";
  out += "Current regime: " + s.regime_label + " (valence: " + fixed2(s.valence) +
         ", arousal: " + fixed2(s.arousal) + ")\n";
  out += "Regime persistence: " + std::to_string(s.persistence_turns) + " consecutive turns (" +
         (s.stable ? "stable" : "unstable") + ")\n";
  out += "Regime shifts so far: " + std::to_string(s.shifts_so_far) + "\n";
  return out;
}

}  // namespace regimes
