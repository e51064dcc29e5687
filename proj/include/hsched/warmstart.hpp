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

#ifndef HSCHED_WARMSTART_HPP_
#define HSCHED_WARMSTART_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "hsched/diffsched.hpp"
#include "hsched/sdc.hpp"
#include "hsched/warmstart_types.hpp"

namespace hsched {

/// Keeps every node whose confidence reaches `tau_c`, assigned to its
/// sampled stage. Raising the threshold can only shrink the selection.
inline PartialSolution extract_partial(const IterationRecord& rec,
                                       double tau_c) {
  PartialSolution out;
  out.source_iteration = rec.iteration;
  out.node_count = rec.node_count();
  for (int v = 0; v < rec.node_count(); ++v) {
    if (rec.confidence[v] >= tau_c) {
      out.assignments[v] = rec.schedule.stages[v];
      out.confidences[v] = rec.confidence[v];
    }
  }
  return out;
}

/// Nearest-rank percentile of a pool of confidences: the smallest value v
/// such that at least q percent of the pool is <= v.
inline double nearest_rank_percentile(std::vector<double> pool, double q) {
  if (pool.empty()) throw std::invalid_argument("empty confidence pool");
  std::sort(pool.begin(), pool.end());
  auto rank = static_cast<std::size_t>(
      std::ceil(q / 100.0 * static_cast<double>(pool.size())));
  if (rank < 1) rank = 1;
  if (rank > pool.size()) rank = pool.size();
  return pool[rank - 1];
}

/// Threshold from the confidences pooled across all records. With q = 70
/// the extraction keeps roughly the top 30% most confident assignments.
inline double auto_threshold(const std::vector<IterationRecord>& records,
                             double q = 70.0) {
  std::vector<double> pool;
  for (const IterationRecord& rec : records) {
    pool.insert(pool.end(), rec.confidence.begin(), rec.confidence.end());
  }
  return nearest_rank_percentile(std::move(pool), q);
}

inline double resolve_threshold(const ThresholdPolicy& policy,
                                const std::vector<IterationRecord>& records) {
  return policy.mode == ThresholdPolicy::Mode::kFixed
             ? policy.value
             : auto_threshold(records, policy.value);
}

/// Policy-based extraction against a single record; percentile mode pools
/// over that record only.
inline PartialSolution extract_partial(const IterationRecord& rec,
                                       const ThresholdPolicy& policy) {
  double tau = policy.mode == ThresholdPolicy::Mode::kFixed
                   ? policy.value
                   : nearest_rank_percentile(rec.confidence, policy.value);
  return extract_partial(rec, tau);
}

/// Drops the lower-confidence endpoint of every internally violated
/// difference constraint until none remain. Sampled partials are feasible by
/// construction and pass through unchanged; this guards replayed or
/// externally supplied hints.
inline PartialSolution consistency_filter(PartialSolution partial,
                                          const SdcSystem& sdc) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const SdcConstraint& con : sdc.constraints) {
      auto it = partial.assignments.find(con.i);
      auto jt = partial.assignments.find(con.j);
      if (it == partial.assignments.end() || jt == partial.assignments.end()) {
        continue;
      }
      if (it->second - jt->second <= con.c) continue;
      double ci = partial.confidences.count(con.i) ? partial.confidences[con.i]
                                                   : 0.0;
      double cj = partial.confidences.count(con.j) ? partial.confidences[con.j]
                                                   : 0.0;
      int drop = ci < cj ? con.i : con.j;
      partial.assignments.erase(drop);
      partial.confidences.erase(drop);
      changed = true;
    }
  }
  return partial;
}

}  // namespace hsched

#endif  // HSCHED_WARMSTART_HPP_
