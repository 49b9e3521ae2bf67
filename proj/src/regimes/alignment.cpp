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

#include "regimes/alignment.hpp"

#include <algorithm>
#include <limits>

#include "regimes/error.hpp"

namespace regimes {

CostMatrix build_cost_matrix(const LabelSequence& pred, const LabelSequence& ref) {
  if (pred.size() != ref.size())
    throw Error(ErrorCode::LengthMismatch, "predicted and reference sequences differ in length (" +
                                               std::to_string(pred.size()) + " vs " +
                                               std::to_string(ref.size()) + ")");
  for (std::size_t t = 0; t < pred.size(); ++t)
    if (pred[t] < 0 || ref[t] < 0) throw Error(ErrorCode::InvalidArgument, "labels must be non-negative");
  CostMatrix c;
  c.rows = pred.max_label() + 1;
  c.cols = ref.max_label() + 1;
  c.entries.assign(std::size_t(c.rows) * std::size_t(c.cols), 0);
  for (std::size_t t = 0; t < pred.size(); ++t) --c.at(pred[t], ref[t]);
  return c;
}

std::vector<int> hungarian(const std::vector<std::vector<std::int64_t>>& a) {
  // Classic O(n^3) shortest augmenting path formulation, 1-indexed internally.
  const int n = int(a.size());
  if (n == 0) return {};
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> u(std::size_t(n) + 1, 0), v(std::size_t(n) + 1, 0);
  std::vector<int> p(std::size_t(n) + 1, 0), way(std::size_t(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<std::int64_t> minv(std::size_t(n) + 1, kInf);
    std::vector<bool> used(std::size_t(n) + 1, false);
    do {
      used[std::size_t(j0)] = true;
      const int i0 = p[std::size_t(j0)];
      std::int64_t delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[std::size_t(j)]) continue;
        const std::int64_t cur = a[std::size_t(i0 - 1)][std::size_t(j - 1)] - u[std::size_t(i0)] - v[std::size_t(j)];
        if (cur < minv[std::size_t(j)]) {
          minv[std::size_t(j)] = cur;
          way[std::size_t(j)] = j0;
        }
        if (minv[std::size_t(j)] < delta) {
          delta = minv[std::size_t(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[std::size_t(j)]) {
          u[std::size_t(p[std::size_t(j)])] += delta;
          v[std::size_t(j)] -= delta;
        } else {
          minv[std::size_t(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[std::size_t(j0)] != 0);
    do {
      const int j1 = way[std::size_t(j0)];
      p[std::size_t(j0)] = p[std::size_t(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j)
    if (p[std::size_t(j)] > 0) row_to_col[std::size_t(p[std::size_t(j)] - 1)] = j - 1;
  return row_to_col;
}

namespace {

std::int64_t matching_cost(const std::vector<std::vector<std::int64_t>>& a) {
  const auto cols = hungarian(a);
  std::int64_t total = 0;
  for (std::size_t i = 0; i < cols.size(); ++i) total += a[i][std::size_t(cols[i])];
  return total;
}

// Square matrix with the given rows and columns removed.
std::vector<std::vector<std::int64_t>> minor(const std::vector<std::vector<std::int64_t>>& a,
                                             const std::vector<bool>& row_gone,
                                             const std::vector<bool>& col_gone) {
  std::vector<std::vector<std::int64_t>> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (row_gone[i]) continue;
    std::vector<std::int64_t> r;
    for (std::size_t j = 0; j < a.size(); ++j)
      if (!col_gone[j]) r.push_back(a[i][j]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

Assignment solve_assignment(const CostMatrix& cost) {
  const int n = std::max(cost.rows, cost.cols);
  std::vector<std::vector<std::int64_t>> square(static_cast<std::size_t>(n), std::vector<std::int64_t>(std::size_t(n), 0));
  for (int i = 0; i < cost.rows; ++i)
    for (int j = 0; j < cost.cols; ++j) square[std::size_t(i)][std::size_t(j)] = cost.at(i, j);

  // Fix rows in order, giving each the smallest column that keeps the
  // remaining problem optimal.
  const std::int64_t optimum = matching_cost(square);
  std::vector<bool> row_gone(static_cast<std::size_t>(n), false), col_gone(std::size_t(n), false);
  std::vector<int> col_of(static_cast<std::size_t>(n), -1);
  std::int64_t fixed_cost = 0;
  for (int i = 0; i < n; ++i) {
    row_gone[std::size_t(i)] = true;
    for (int j = 0; j < n; ++j) {
      if (col_gone[std::size_t(j)]) continue;
      col_gone[std::size_t(j)] = true;
      const auto rest = minor(square, row_gone, col_gone);
      const std::int64_t total =
          fixed_cost + square[std::size_t(i)][std::size_t(j)] + (rest.empty() ? 0 : matching_cost(rest));
      if (total == optimum) {
        col_of[std::size_t(i)] = j;
        fixed_cost += square[std::size_t(i)][std::size_t(j)];
        break;
      }
      col_gone[std::size_t(j)] = false;
    }
  }

  Assignment a;
  for (int i = 0; i < cost.rows; ++i) {
    const int j = col_of[std::size_t(i)];
    if (j >= 0 && j < cost.cols) {
      a.mapping[i] = j;
      a.total_overlap -= cost.at(i, j);
    }
  }
  return a;
}

LabelSequence remap(const LabelSequence& pred, const Assignment& assignment, int num_ref_labels) {
  std::map<int, int> full = assignment.mapping;
  int fresh = num_ref_labels;
  std::vector<int> distinct(pred.labels);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  for (int l : distinct)
    if (!full.count(l)) full[l] = fresh++;
  LabelSequence out;
  out.labels.reserve(pred.size());
  for (int l : pred.labels) out.labels.push_back(full[l]);
  return out;
}

LabelSequence align(const LabelSequence& pred, const LabelSequence& ref) {
  const auto cost = build_cost_matrix(pred, ref);
  return remap(pred, solve_assignment(cost), cost.cols);
}

}  // namespace regimes
