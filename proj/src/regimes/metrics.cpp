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

#include "regimes/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "regimes/alignment.hpp"
#include "regimes/error.hpp"

namespace regimes {
namespace {

void require_same_length(const LabelSequence& a, const LabelSequence& b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::LengthMismatch, "label sequences differ in length (" +
                                               std::to_string(a.size()) + " vs " +
                                               std::to_string(b.size()) + ")");
}

void require_nonempty(const LabelSequence& a) {
  if (a.size() == 0) throw Error(ErrorCode::EmptySeries, "empty label sequence");
}

double entropy(const std::map<int, std::size_t>& counts, double total) {
  double h = 0.0;
  for (const auto& [_, c] : counts) {
    const double p = double(c) / total;
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double f1(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

}  // namespace

std::vector<Segment> segments(const LabelSequence& labels) {
  require_nonempty(labels);
  std::vector<Segment> out;
  out.push_back({labels[0], 0, 0});
  for (std::size_t t = 1; t < labels.size(); ++t) {
    if (labels[t] == out.back().label)
      out.back().end = t;
    else
      out.push_back({labels[t], t, t});
  }
  return out;
}

TemporalStats temporal_stats(const LabelSequence& labels) {
  const auto segs = segments(labels);
  TemporalStats s;
  const double n = double(segs.size());
  s.mean_regime_duration = double(labels.size()) / n;
  s.single_utterance_fraction =
      double(std::count_if(segs.begin(), segs.end(), [](const Segment& g) { return g.length() == 1; })) / n;
  s.regime_shifts = int(segs.size()) - 1;
  std::map<int, std::size_t> counts;
  for (int l : labels.labels) ++counts[l];
  s.effective_regimes = int(counts.size());
  std::size_t top = 0;
  for (const auto& [_, c] : counts) top = std::max(top, c);
  s.dominant_regime_share = double(top) / double(labels.size());
  return s;
}

double transition_entropy(const LabelSequence& labels) {
  if (labels.size() < 2)
    throw Error(ErrorCode::DegenerateInput, "transition entropy needs at least two labels");
  std::map<int, std::map<int, std::size_t>> rows;
  for (std::size_t t = 1; t < labels.size(); ++t) ++rows[labels[t - 1]][labels[t]];
  const std::size_t k = labels.num_labels();
  if (k < 2) return 0.0;
  const double pairs = double(labels.size() - 1);
  double h = 0.0;
  for (const auto& [_, row] : rows) {
    double n = 0.0;
    for (const auto& [__, c] : row) n += double(c);
    h += (n / pairs) * entropy(row, n);
  }
  return h / std::log(double(k));
}

double temporal_purity(const LabelSequence& labels, const LabelSequence& ref) {
  require_same_length(labels, ref);
  double covered = 0.0;
  for (const auto& seg : segments(labels)) {
    std::map<int, std::size_t> counts;
    for (std::size_t t = seg.start; t <= seg.end; ++t) ++counts[ref[t]];
    std::size_t top = 0;
    for (const auto& [_, c] : counts) top = std::max(top, c);
    covered += double(top);
  }
  return covered / double(labels.size());
}

double nmi(const LabelSequence& a, const LabelSequence& b) {
  require_same_length(a, b);
  require_nonempty(a);
  const double n = double(a.size());
  std::map<int, std::size_t> ca, cb;
  std::map<std::pair<int, int>, std::size_t> joint;
  for (std::size_t t = 0; t < a.size(); ++t) {
    ++ca[a[t]];
    ++cb[b[t]];
    ++joint[{a[t], b[t]}];
  }
  const double ha = entropy(ca, n), hb = entropy(cb, n);
  const bool const_a = ca.size() == 1, const_b = cb.size() == 1;
  if (const_a && const_b) return 1.0;
  if (const_a || const_b) return 0.0;
  double mi = 0.0;
  for (const auto& [key, c] : joint) {
    const double pxy = double(c) / n;
    mi += pxy * std::log(pxy * n * n / (double(ca[key.first]) * double(cb[key.second])));
  }
  return std::clamp(mi / std::sqrt(ha * hb), 0.0, 1.0);
}

double segment_f1(const LabelSequence& pred_aligned, const LabelSequence& ref) {
  require_same_length(pred_aligned, ref);
  const auto p = segments(pred_aligned);
  const auto r = segments(ref);
  std::set<std::tuple<int, std::size_t, std::size_t>> ref_set;
  for (const auto& s : r) ref_set.insert({s.label, s.start, s.end});
  std::size_t tp = 0;
  for (const auto& s : p) tp += ref_set.count({s.label, s.start, s.end});
  return f1(double(tp) / double(p.size()), double(tp) / double(r.size()));
}

std::vector<std::size_t> boundaries(const LabelSequence& labels) {
  std::vector<std::size_t> out;
  for (std::size_t t = 1; t < labels.size(); ++t)
    if (labels[t] != labels[t - 1]) out.push_back(t);
  return out;
}

double boundary_f1(const LabelSequence& pred, const LabelSequence& ref, int tol) {
  require_same_length(pred, ref);
  if (tol < 0) throw Error(ErrorCode::InvalidArgument, "boundary tolerance must be >= 0");
  const auto pb = boundaries(pred), rb = boundaries(ref);
  if (pb.empty() && rb.empty()) return 1.0;
  if (pb.empty() || rb.empty()) return 0.0;
  struct Candidate {
    long distance;
    std::size_t p, r;
  };
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < pb.size(); ++i)
    for (std::size_t j = 0; j < rb.size(); ++j) {
      const long d = std::labs(long(pb[i]) - long(rb[j]));
      if (d <= tol) cands.push_back({d, i, j});
    }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.distance, a.p, a.r) < std::tie(b.distance, b.p, b.r);
  });
  std::vector<bool> p_used(pb.size(), false), r_used(rb.size(), false);
  std::size_t matched = 0;
  for (const auto& c : cands) {
    if (p_used[c.p] || r_used[c.r]) continue;
    p_used[c.p] = r_used[c.r] = true;
    ++matched;
  }
  return f1(double(matched) / double(pb.size()), double(matched) / double(rb.size()));
}

GeometryStats geometry_stats(const LabelSequence& labels, const ConversationSeries& series) {
  if (labels.size() != series.size())
    throw Error(ErrorCode::LengthMismatch, "labels and series differ in length");
  require_nonempty(labels);
  const Eigen::MatrixXd x = series.stacked();
  std::map<int, Eigen::VectorXd> sums;
  std::map<int, std::size_t> counts;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    auto [it, fresh] = sums.try_emplace(labels[t], Eigen::VectorXd::Zero(x.cols()));
    it->second += x.row(Eigen::Index(t)).transpose();
    ++counts[labels[t]];
  }
  std::vector<Eigen::VectorXd> centroids;
  std::map<int, std::size_t> index;
  for (auto& [l, s] : sums) {
    index[l] = centroids.size();
    centroids.push_back(s / double(counts[l]));
  }
  GeometryStats g;
  double sq = 0.0;
  for (std::size_t t = 0; t < labels.size(); ++t)
    sq += (x.row(Eigen::Index(t)).transpose() - centroids[index[labels[t]]]).squaredNorm();
  g.intra_regime_variance = sq / double(labels.size());
  if (centroids.size() > 1) {
    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < centroids.size(); ++i)
      for (std::size_t j = i + 1; j < centroids.size(); ++j, ++pairs)
        total += (centroids[i] - centroids[j]).norm();
    g.inter_regime_centroid_distance = total / double(pairs);
  }
  return g;
}

MetricReport evaluate(const LabelSequence& pred, const std::optional<LabelSequence>& ref,
                      const ConversationSeries& series) {
  if (pred.size() != series.size())
    throw Error(ErrorCode::LengthMismatch, "predicted labels (" + std::to_string(pred.size()) +
                                               ") and series (" + std::to_string(series.size()) +
                                               ") differ in length");
  MetricReport r;
  if (ref) {
    require_same_length(pred, *ref);
    const auto aligned = align(pred, *ref);
    r.segment_f1 = segment_f1(aligned, *ref);
    r.boundary_f1 = boundary_f1(pred, *ref, 1);
    r.nmi = nmi(pred, *ref);
    r.temporal_purity = temporal_purity(pred, *ref);
  }
  const auto ts = temporal_stats(pred);
  r.mean_regime_duration = ts.mean_regime_duration;
  r.single_utterance_fraction = ts.single_utterance_fraction;
  r.regime_shifts = ts.regime_shifts;
  r.effective_regimes = ts.effective_regimes;
  r.dominant_regime_share = ts.dominant_regime_share;
  r.transition_entropy = pred.size() >= 2 ? transition_entropy(pred) : 0.0;
  const auto gs = geometry_stats(pred, series);
  r.intra_regime_variance = gs.intra_regime_variance;
  r.inter_regime_centroid_distance = gs.inter_regime_centroid_distance;
  return r;
}

MetricReport aggregate(std::span<const MetricReport> reports) {
  if (reports.empty()) throw Error(ErrorCode::InvalidArgument, "no reports to aggregate");
  MetricReport m;
  const double n = double(reports.size());
  auto mean_opt = [&](std::optional<double> MetricReport::*field) -> std::optional<double> {
    double s = 0.0;
    std::size_t c = 0;
    for (const auto& r : reports)
      if (r.*field) {
        s += *(r.*field);
        ++c;
      }
    if (c == 0) return std::nullopt;
    return s / double(c);
  };
  auto mean = [&](double MetricReport::*field) {
    double s = 0.0;
    for (const auto& r : reports) s += r.*field;
    return s / n;
  };
  m.segment_f1 = mean_opt(&MetricReport::segment_f1);
  m.boundary_f1 = mean_opt(&MetricReport::boundary_f1);
  m.nmi = mean_opt(&MetricReport::nmi);
  m.temporal_purity = mean_opt(&MetricReport::temporal_purity);
  m.mean_regime_duration = mean(&MetricReport::mean_regime_duration);
  m.single_utterance_fraction = mean(&MetricReport::single_utterance_fraction);
  m.regime_shifts = mean(&MetricReport::regime_shifts);
  m.transition_entropy = mean(&MetricReport::transition_entropy);
  m.intra_regime_variance = mean(&MetricReport::intra_regime_variance);
  m.inter_regime_centroid_distance = mean(&MetricReport::inter_regime_centroid_distance);
  m.effective_regimes = mean(&MetricReport::effective_regimes);
  m.dominant_regime_share = mean(&MetricReport::dominant_regime_share);
  return m;
}

}  // namespace regimes
