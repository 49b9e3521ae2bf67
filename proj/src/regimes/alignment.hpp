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

#include <cstdint>
#include <map>
#include <vector>

#include "regimes/core.hpp"

namespace regimes {

// M x K matrix of negated co-occurrence counts between predicted label i and
// reference label j.
struct CostMatrix {
  int rows = 0;  // predicted labels (M)
  int cols = 0;  // reference labels (K)
  std::vector<std::int64_t> entries;  // row-major

  std::int64_t at(int i, int j) const { return entries[std::size_t(i) * std::size_t(cols) + std::size_t(j)]; }
  std::int64_t& at(int i, int j) { return entries[std::size_t(i) * std::size_t(cols) + std::size_t(j)]; }
};

struct Assignment {
  std::map<int, int> mapping;  // predicted -> reference, injective
  std::int64_t total_overlap = 0;
};

CostMatrix build_cost_matrix(const LabelSequence& pred, const LabelSequence& ref);

// Minimum-cost perfect matching of a square matrix (Kuhn-Munkres with
// potentials). Returns the column assigned to each row.
std::vector<int> hungarian(const std::vector<std::vector<std::int64_t>>& square);

// Optimal assignment on the zero-padded square matrix; dummy matches are
// dropped. Among optimal assignments the lexicographically smallest
// (row, column) pair list wins.
Assignment solve_assignment(const CostMatrix& cost);

// Matched labels take their reference label; unmatched predicted labels get
// fresh integers K, K+1, ... in increasing predicted-label order.
LabelSequence remap(const LabelSequence& pred, const Assignment& assignment, int num_ref_labels);

// build_cost_matrix + solve_assignment + remap.
LabelSequence align(const LabelSequence& pred, const LabelSequence& ref);

}  // namespace regimes
