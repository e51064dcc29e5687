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

#ifndef HSCHED_WORKLOAD_HPP_
#define HSCHED_WORKLOAD_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "hsched/common.hpp"
#include "hsched/graph.hpp"

namespace hsched {

/// Edge-weight distribution for synthetic workloads.
struct WeightDist {
  enum class Kind { kConstant, kUniform };
  Kind kind = Kind::kConstant;
  double a = 1.0;  // constant value, or lower bound
  double b = 1.0;  // upper bound (uniform)

  static WeightDist constant(double w) {
    return WeightDist{Kind::kConstant, w, w};
  }
  static WeightDist uniform(double lo, double hi) {
    return WeightDist{Kind::kUniform, lo, hi};
  }

  /// Accepts "const:W" or "uniform:LO,HI" (CLI spelling).
  static WeightDist parse(const std::string& text) {
    auto colon = text.find(':');
    std::string head = text.substr(0, colon);
    std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
    try {
      if (head == "const" || head == "constant") {
        return constant(args.empty() ? 1.0 : std::stod(args));
      }
      if (head == "uniform") {
        auto comma = args.find(',');
        if (comma == std::string::npos) {
          throw ParseError("uniform needs two bounds: uniform:LO,HI");
        }
        return uniform(std::stod(args.substr(0, comma)),
                       std::stod(args.substr(comma + 1)));
      }
    } catch (const std::invalid_argument&) {
      throw ParseError("bad number in weight distribution '" + text + "'");
    }
    throw ParseError("unknown weight distribution '" + text +
                     "' (expected const:W or uniform:LO,HI)");
  }
};

/// Random layered-free DAG: every pair (i, j) with i < j carries an edge
/// with probability `edge_prob`, so the result is acyclic by construction.
/// Pure function of its arguments; the same (n, p, dist, seed) always gives
/// the same graph.
inline Dag generate_random_workload(int node_count, double edge_prob,
                                    const WeightDist& dist,
                                    std::uint64_t seed) {
  if (node_count < 1) {
    throw ParseError("workload needs at least one node");
  }
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) {
    throw ParseError("edge probability must lie in [0, 1]");
  }
  SplitRng rng(seed);
  std::vector<Edge> edges;
  for (int i = 0; i < node_count; ++i) {
    for (int j = i + 1; j < node_count; ++j) {
      double u = rng.uniform();
      if (edge_prob >= 1.0 || u < edge_prob) {
        double w = dist.kind == WeightDist::Kind::kConstant
                       ? dist.a
                       : rng.uniform(dist.a, dist.b);
        edges.push_back(Edge{i, j, w, 0});
      }
    }
  }
  return Dag(node_count, std::move(edges));
}

}  // namespace hsched

#endif  // HSCHED_WORKLOAD_HPP_
