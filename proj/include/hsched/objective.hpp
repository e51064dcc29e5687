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

#ifndef HSCHED_OBJECTIVE_HPP_
#define HSCHED_OBJECTIVE_HPP_

#include <algorithm>
#include <limits>
#include <vector>

#include "hsched/graph.hpp"
#include "hsched/sdc.hpp"

namespace hsched {

/// Cost of a schedule. `combined` is the solver objective
///   alpha * peak / ceil(|V|/L)  +  comm / sum(edge weights)
/// so both components start near 1 and `alpha` trades them off directly.
/// `normalized_pct` rescales `combined` so the deterministic list-scheduling
/// baseline sits at exactly 100.
struct ObjectiveBreakdown {
  int peak = 0;
  double comm = 0.0;
  double combined = 0.0;
  double normalized_pct = 0.0;
};

/// Lower bound on the peak stage population (pigeonhole).
inline int peak_floor(int node_count, int latency) {
  return ceil_div(node_count, latency);
}

namespace detail {

/// peak and comm without normalization; assumes the schedule is feasible.
inline void raw_costs(const Schedule& schedule, const Dag& dag, int* peak,
                      double* comm) {
  std::vector<int> load(schedule.latency, 0);
  for (int s : schedule.stages) ++load[s];
  *peak = *std::max_element(load.begin(), load.end());
  double c = 0.0;
  for (const Edge& e : dag.edges()) {
    int span = schedule.stages[e.dst] - schedule.stages[e.src];
    if (span > 0) c += e.weight * span;
  }
  *comm = c;
}

inline double combine(int peak, double comm, const Dag& dag, int latency,
                      double alpha) {
  double resource = static_cast<double>(peak) /
                    peak_floor(dag.node_count(), latency);
  double w = dag.total_edge_weight();
  double communication = w > 0 ? comm / w : 0.0;
  return alpha * resource + communication;
}

}  // namespace detail

/// Deterministic list scheduler: nodes in topological order, each placed at
/// the in-window stage that minimizes (stage population, added crossing
/// weight, stage index). Used as the normalization baseline and as the
/// branch value order inside the exact solver.
inline Schedule heuristic_schedule(const Dag& dag, int latency) {
  auto windows = stage_windows(dag, latency);
  Schedule out{latency, std::vector<int>(dag.node_count(), 0)};
  std::vector<int> load(latency, 0);
  for (int v : dag.topological_order()) {
    int lo = windows[v].earliest;
    for (int k : dag.in_edges(v)) {
      const Edge& e = dag.edges()[k];
      lo = std::max(lo, out.stages[e.src] - e.diff_const);
    }
    int best = -1;
    int best_load = std::numeric_limits<int>::max();
    double best_cross = 0.0;
    for (int a = lo; a <= windows[v].latest; ++a) {
      double cross = 0.0;
      for (int k : dag.in_edges(v)) {
        const Edge& e = dag.edges()[k];
        cross += e.weight * std::max(0, a - out.stages[e.src]);
      }
      if (load[a] < best_load ||
          (load[a] == best_load && cross < best_cross)) {
        best = a;
        best_load = load[a];
        best_cross = cross;
      }
    }
    out.stages[v] = best;
    ++load[best];
  }
  return out;
}

/// Evaluates a feasible schedule exactly: true max stage population and the
/// weighted count of stage boundaries each edge spans. Rejects infeasible
/// input.
inline ObjectiveBreakdown evaluate_objective(const Schedule& schedule,
                                             const Dag& dag, double alpha) {
  SdcSystem sdc = build_sdc(dag, schedule.latency);
  if (!feasible(schedule, sdc)) {
    throw InfeasibleError("evaluate_objective: schedule violates the SDC system");
  }
  ObjectiveBreakdown out;
  detail::raw_costs(schedule, dag, &out.peak, &out.comm);
  out.combined = detail::combine(out.peak, out.comm, dag, schedule.latency, alpha);

  Schedule baseline = heuristic_schedule(dag, schedule.latency);
  int peak_h = 0;
  double comm_h = 0.0;
  detail::raw_costs(baseline, dag, &peak_h, &comm_h);
  double combined_h = detail::combine(peak_h, comm_h, dag, schedule.latency, alpha);
  out.normalized_pct =
      combined_h > 0 ? 100.0 * (out.combined / combined_h)
                     : (out.combined == 0.0
                            ? 100.0
                            : std::numeric_limits<double>::infinity());
  return out;
}

}  // namespace hsched

#endif  // HSCHED_OBJECTIVE_HPP_
