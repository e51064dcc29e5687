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

#ifndef HSCHED_TESTS_TEST_UTIL_HPP_
#define HSCHED_TESTS_TEST_UTIL_HPP_

#include <cmath>
#include <limits>
#include <vector>

#include "hsched/graph.hpp"
#include "hsched/sdc.hpp"
#include "hsched/workload.hpp"

namespace hsched::testing {

// Small fixture graphs ------------------------------------------------------

/// Seven-task DFG with three fan-in sources feeding a merge node that fans
/// out to two sinks, plus one side chain. Used across the suite as the
/// canonical worked example.
inline Dag dfg7() {
  return Dag(7, {{0, 4, 1.0, 0},
                 {1, 4, 1.0, 0},
                 {2, 4, 1.0, 0},
                 {3, 5, 1.0, 0},
                 {4, 5, 1.0, 0},
                 {4, 6, 1.0, 0}});
}

inline Dag chain(int n, int c, double weight = 1.0) {
  std::vector<Edge> edges;
  for (int v = 0; v + 1 < n; ++v) edges.push_back({v, v + 1, weight, c});
  return Dag(n, std::move(edges));
}

inline Dag diamond() {
  return Dag(4, {{0, 1, 1.0, 0}, {0, 2, 1.0, 0}, {1, 3, 1.0, 0}, {2, 3, 1.0, 0}});
}

/// Random workload with a seeded share of strict (c = -1) edges, flipped
/// only while the longest strict chain still fits the latency, so the
/// result is always feasible.
inline Dag random_mixed_dag(int n, double p, int latency, std::uint64_t seed,
                            double strict_prob = 0.15) {
  Dag base = generate_random_workload(n, p, WeightDist::uniform(0.5, 2.0), seed);
  SplitRng rng(mix_u64(seed ^ 0x5eedULL));
  std::vector<Edge> edges = base.edges();
  // The generator emits edges with ascending src, so every in-edge of a
  // node's source precedes it and `depth` is the exact ASAP stage.
  std::vector<int> depth(n, 0);
  for (Edge& e : edges) {
    if (rng.uniform() < strict_prob && depth[e.src] + 1 <= latency - 1) {
      e.diff_const = -1;
      depth[e.dst] = std::max(depth[e.dst], depth[e.src] + 1);
    } else {
      depth[e.dst] = std::max(depth[e.dst], depth[e.src]);
    }
  }
  return Dag(n, std::move(edges));
}

// Independent brute-force oracle --------------------------------------------

struct BruteForceResult {
  double best = std::numeric_limits<double>::infinity();
  Schedule schedule;
  long feasible_count = 0;
};

/// Exhaustive enumeration of all latency^n assignments with a from-scratch
/// cost computation. Deliberately shares no code with the solver under test
/// beyond the Dag accessors.
inline BruteForceResult brute_force_min(const Dag& dag, int latency,
                                        double alpha) {
  const int n = dag.node_count();
  BruteForceResult result;
  result.schedule = Schedule{latency, std::vector<int>(n, 0)};
  std::vector<int> stages(n, 0);
  double wsum = 0.0;
  for (const Edge& e : dag.edges()) wsum += e.weight;
  const int denom = (n + latency - 1) / latency;

  for (;;) {
    bool ok = true;
    for (const Edge& e : dag.edges()) {
      if (stages[e.src] - stages[e.dst] > e.diff_const) {
        ok = false;
        break;
      }
    }
    if (ok) {
      ++result.feasible_count;
      std::vector<int> load(latency, 0);
      for (int s : stages) ++load[s];
      int peak = 0;
      for (int l : load) peak = std::max(peak, l);
      double comm = 0.0;
      for (const Edge& e : dag.edges()) {
        comm += e.weight * std::max(0, stages[e.dst] - stages[e.src]);
      }
      double resource = static_cast<double>(peak) / denom;
      double combined = alpha * resource + (wsum > 0 ? comm / wsum : 0.0);
      if (combined < result.best) {
        result.best = combined;
        result.schedule.stages = stages;
      }
    }
    int pos = n - 1;
    while (pos >= 0 && stages[pos] == latency - 1) stages[pos--] = 0;
    if (pos < 0) break;
    ++stages[pos];
  }
  return result;
}

}  // namespace hsched::testing

#endif  // HSCHED_TESTS_TEST_UTIL_HPP_
