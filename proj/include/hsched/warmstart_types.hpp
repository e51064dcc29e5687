// Copyright 2026 The hsched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HSCHED_WARMSTART_TYPES_HPP_
#define HSCHED_WARMSTART_TYPES_HPP_

#include <map>
#include <stdexcept>

namespace hsched {

/// Confidence-tagged subset of node -> stage assignments. Used purely as a
/// non-binding solver hint: it never fixes variables.
struct PartialSolution {
  std::map<int, int> assignments;        // node -> stage
  std::map<int, double> confidences;     // node -> C
  int source_iteration = -1;
  int node_count = 0;

  double coverage() const {
    return node_count > 0
               ? static_cast<double>(assignments.size()) / node_count
               : 0.0;
  }
  bool empty() const { return assignments.empty(); }
};

/// How to pick the confidence threshold: an explicit value, or the q-th
/// percentile of the pooled confidences (q = 70 keeps the top 30%).
struct ThresholdPolicy {
  enum class Mode { kFixed, kPercentile };
  Mode mode = Mode::kPercentile;
  double value = 70.0;

  static ThresholdPolicy fixed(double tau) {
    if (tau < 0.0 || tau > 1.0) {
      throw std::invalid_argument("confidence threshold must lie in [0, 1]");
    }
    return ThresholdPolicy{Mode::kFixed, tau};
  }
  static ThresholdPolicy percentile(double q = 70.0) {
    if (!(q > 0.0 && q < 100.0)) {
      throw std::invalid_argument("percentile must lie in (0, 100)");
    }
    return ThresholdPolicy{Mode::kPercentile, q};
  }
};

}  // namespace hsched

#endif  // HSCHED_WARMSTART_TYPES_HPP_
