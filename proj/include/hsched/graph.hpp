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

#ifndef HSCHED_GRAPH_HPP_
#define HSCHED_GRAPH_HPP_

#include <algorithm>
#include <cstdint>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hsched/common.hpp"

namespace hsched {

/// Directed edge i -> j. `weight` is the communication cost paid per stage
/// boundary the edge spans. `diff_const` is the right-hand side of the
/// difference constraint s_src - s_dst <= diff_const; 0 (the default) lets
/// dependent nodes share a stage, -1 forces the destination strictly later.
struct Edge {
  int src = 0;
  int dst = 0;
  double weight = 1.0;
  int diff_const = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Immutable DAG over dense node ids [0, node_count). Construction validates
/// every structural invariant (acyclicity, id ranges, no self-loops or
/// duplicate arcs, nonnegative weights) and precomputes the deterministic
/// topological order plus adjacency, so a constructed Dag can be shared
/// read-only across threads.
class Dag {
 public:
  Dag() : Dag(0, {}) {}

  Dag(int node_count, std::vector<Edge> edges,
      std::vector<std::string> labels = {})
      : node_count_(node_count),
        edges_(std::move(edges)),
        labels_(std::move(labels)) {
    validate_and_index();
  }

  int node_count() const { return node_count_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Edge indices entering / leaving `v`.
  const std::vector<int>& in_edges(int v) const { return in_edges_[v]; }
  const std::vector<int>& out_edges(int v) const { return out_edges_[v]; }

  /// Nodes ordered so every edge goes forward; ties broken by ascending id.
  const std::vector<int>& topological_order() const { return topo_order_; }

  double total_edge_weight() const { return total_weight_; }

 private:
  void validate_and_index() {
    if (node_count_ < 0) throw ParseError("node count must be nonnegative");
    in_edges_.assign(node_count_, {});
    out_edges_.assign(node_count_, {});
    std::set<std::pair<int, int>> seen;
    for (std::size_t k = 0; k < edges_.size(); ++k) {
      const Edge& e = edges_[k];
      if (e.src < 0 || e.src >= node_count_ || e.dst < 0 ||
          e.dst >= node_count_) {
        throw ParseError("edge " + std::to_string(k) +
                         " references node outside [0, " +
                         std::to_string(node_count_) + "): (" +
                         std::to_string(e.src) + ", " + std::to_string(e.dst) +
                         ")");
      }
      if (e.src == e.dst) {
        throw ParseError("self-loop at node " + std::to_string(e.src));
      }
      if (!(e.weight >= 0) || !std::isfinite(e.weight)) {
        throw ParseError("edge (" + std::to_string(e.src) + ", " +
                         std::to_string(e.dst) + ") has negative weight " +
                         fmt_double(e.weight));
      }
      if (!seen.insert({e.src, e.dst}).second) {
        throw ParseError("duplicate edge (" + std::to_string(e.src) + ", " +
                         std::to_string(e.dst) + ")");
      }
      out_edges_[e.src].push_back(static_cast<int>(k));
      in_edges_[e.dst].push_back(static_cast<int>(k));
      total_weight_ += e.weight;
    }
    if (!labels_.empty() &&
        labels_.size() != static_cast<std::size_t>(node_count_)) {
      throw ParseError("label count " + std::to_string(labels_.size()) +
                       " does not match node count " +
                       std::to_string(node_count_));
    }

    // Kahn's algorithm with a min-heap gives the id-tie-broken order and
    // doubles as the acyclicity check.
    std::vector<int> indegree(node_count_, 0);
    for (const Edge& e : edges_) ++indegree[e.dst];
    std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
    for (int v = 0; v < node_count_; ++v) {
      if (indegree[v] == 0) ready.push(v);
    }
    topo_order_.reserve(node_count_);
    while (!ready.empty()) {
      int v = ready.top();
      ready.pop();
      topo_order_.push_back(v);
      for (int k : out_edges_[v]) {
        if (--indegree[edges_[k].dst] == 0) ready.push(edges_[k].dst);
      }
    }
    if (topo_order_.size() != static_cast<std::size_t>(node_count_)) {
      int witness = 0;
      for (int v = 0; v < node_count_; ++v) {
        if (indegree[v] > 0) {
          witness = v;
          break;
        }
      }
      throw ParseError("cycle detected involving node " +
                       std::to_string(witness));
    }
  }

  int node_count_;
  std::vector<Edge> edges_;
  std::vector<std::string> labels_;
  std::vector<std::vector<int>> in_edges_;
  std::vector<std::vector<int>> out_edges_;
  std::vector<int> topo_order_;
  double total_weight_ = 0.0;
};

inline const std::vector<int>& topological_order(const Dag& dag) {
  return dag.topological_order();
}

/// Feasible stage interval for one node under a latency bound.
struct StageWindow {
  int node = 0;
  int earliest = 0;
  int latest = 0;
};

/// ASAP/ALAP stage windows: `earliest` propagates s_dst >= s_src - c forward
/// along edges, `latest` propagates the mirror bound backward, capped at
/// [0, L-1]. Returns std::nullopt when some node ends up with an empty
/// window (the latency cannot be met).
inline std::optional<std::vector<StageWindow>> try_stage_windows(
    const Dag& dag, int latency) {
  if (latency < 1) return std::nullopt;
  const int n = dag.node_count();
  std::vector<int> earliest(n, 0), latest(n, latency - 1);
  const auto& order = dag.topological_order();
  for (int v : order) {
    for (int k : dag.in_edges(v)) {
      const Edge& e = dag.edges()[k];
      earliest[v] = std::max(earliest[v], earliest[e.src] - e.diff_const);
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    for (int k : dag.out_edges(*it)) {
      const Edge& e = dag.edges()[k];
      latest[*it] = std::min(latest[*it], latest[e.dst] + e.diff_const);
    }
  }
  std::vector<StageWindow> windows(n);
  for (int v = 0; v < n; ++v) {
    if (earliest[v] > latest[v]) return std::nullopt;
    windows[v] = StageWindow{v, earliest[v], latest[v]};
  }
  return windows;
}

inline std::vector<StageWindow> stage_windows(const Dag& dag, int latency) {
  if (latency < 1) {
    throw InfeasibleError("latency must be at least 1, got " +
                          std::to_string(latency));
  }
  auto windows = try_stage_windows(dag, latency);
  if (!windows) {
    throw InfeasibleError(
        "no feasible schedule under latency " + std::to_string(latency) +
        ": a precedence chain needs more stages");
  }
  return *windows;
}

}  // namespace hsched

#endif  // HSCHED_GRAPH_HPP_
