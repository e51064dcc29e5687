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

#ifndef HSCHED_SDC_HPP_
#define HSCHED_SDC_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "hsched/graph.hpp"

namespace hsched {

/// s_i - s_j <= c
struct SdcConstraint {
  int i = 0;
  int j = 0;
  int c = 0;
};

/// The difference-constraint system for one instance: one constraint per
/// edge plus the implicit stage bounds 0 <= s_v <= latency-1.
struct SdcSystem {
  int var_count = 0;
  int latency = 0;
  std::vector<SdcConstraint> constraints;
};

/// Stage assignment for every node; stages live in [0, latency).
struct Schedule {
  int latency = 0;
  std::vector<int> stages;

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

inline SdcSystem build_sdc(const Dag& dag, int latency) {
  stage_windows(dag, latency);  // rejects infeasible latency up front
  SdcSystem sdc;
  sdc.var_count = dag.node_count();
  sdc.latency = latency;
  sdc.constraints.reserve(dag.edges().size());
  for (const Edge& e : dag.edges()) {
    sdc.constraints.push_back(SdcConstraint{e.src, e.dst, e.diff_const});
  }
  return sdc;
}

inline bool feasible(const Schedule& schedule, const SdcSystem& sdc) {
  if (schedule.stages.size() != static_cast<std::size_t>(sdc.var_count) ||
      schedule.latency != sdc.latency) {
    throw std::invalid_argument("schedule does not match the SDC system");
  }
  for (int s : schedule.stages) {
    if (s < 0 || s >= sdc.latency) return false;
  }
  for (const SdcConstraint& con : sdc.constraints) {
    if (schedule.stages[con.i] - schedule.stages[con.j] > con.c) return false;
  }
  return true;
}

}  // namespace hsched

#endif  // HSCHED_SDC_HPP_
