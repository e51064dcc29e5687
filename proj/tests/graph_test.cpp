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

#include "hsched/graph.hpp"

#include <gtest/gtest.h>

#include <algorithm>

#include "hsched/graph_io.hpp"
#include "hsched/sdc.hpp"
#include "hsched/workload.hpp"
#include "test_util.hpp"

namespace hsched {
namespace {

using testing::chain;
using testing::dfg7;
using testing::diamond;

TEST(Dag, ValidatesStructure) {
  EXPECT_THROW(Dag(2, {{0, 0, 1.0, 0}}), ParseError);            // self-loop
  EXPECT_THROW(Dag(2, {{0, 3, 1.0, 0}}), ParseError);            // range
  EXPECT_THROW(Dag(2, {{0, 1, -1.0, 0}}), ParseError);           // weight
  EXPECT_THROW(Dag(2, {{0, 1, 1.0, 0}, {0, 1, 2.0, 0}}), ParseError);
  EXPECT_THROW(Dag(3, {{0, 1, 1.0, 0}, {1, 2, 1.0, 0}, {2, 0, 1.0, 0}}),
               ParseError);                                      // cycle
  EXPECT_NO_THROW(Dag(1, {}));
}

TEST(Dag, TopologicalOrderChain) {
  EXPECT_EQ(chain(3, 0).topological_order(), (std::vector<int>{0, 1, 2}));
}

TEST(Dag, TopologicalOrderDfg7) {
  // Sources first (ascending id), merge node before both sinks.
  Dag dag = dfg7();
  const auto& order = dag.topological_order();
  auto pos = [&](int v) {
    return std::find(order.begin(), order.end(), v) - order.begin();
  };
  EXPECT_LT(pos(0), pos(4));
  EXPECT_LT(pos(1), pos(4));
  EXPECT_LT(pos(2), pos(4));
  EXPECT_LT(pos(4), pos(5));
  EXPECT_LT(pos(4), pos(6));
}

TEST(Dag, TopologicalOrderDiamondTieBreak) {
  // Valid orders are 0,1,2,3 and 0,2,1,3; the id tie-break picks the former.
  EXPECT_EQ(diamond().topological_order(), (std::vector<int>{0, 1, 2, 3}));
}

TEST(Dag, TopologicalOrderRespectsEdgesOnRandomGraphs) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Dag dag = generate_random_workload(40, 0.15, WeightDist::constant(1.0), seed);
    const auto& order = dag.topological_order();
    std::vector<int> pos(dag.node_count());
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);
    for (const Edge& e : dag.edges()) EXPECT_LT(pos[e.src], pos[e.dst]);
  }
}

TEST(ParseGraph, JsonRoundTripAndExample) {
  Dag dag = parse_graph_json(R"({"nodes":5, "edges":[[0,4,1.0,0]]})");
  EXPECT_EQ(dag.node_count(), 5);
  ASSERT_EQ(dag.edges().size(), 1u);
  EXPECT_EQ(dag.edges()[0].src, 0);
  EXPECT_EQ(dag.edges()[0].dst, 4);
  EXPECT_EQ(dag.edges()[0].diff_const, 0);

  Dag again = parse_graph_json(write_graph_json(dag));
  EXPECT_EQ(again.node_count(), dag.node_count());
  EXPECT_EQ(again.edges(), dag.edges());
}

TEST(ParseGraph, JsonErrors) {
  EXPECT_THROW(parse_graph_json("{"), ParseError);
  EXPECT_THROW(parse_graph_json(R"({"edges":[]})"), ParseError);
  EXPECT_THROW(parse_graph_json(R"({"nodes":2, "edges":[[0,5]]})"), ParseError);
  EXPECT_THROW(parse_graph_json(R"({"nodes":2, "edges":[[0,1,-2.0]]})"),
               ParseError);
  try {
    parse_graph_json(R"({"nodes":2, "edges":[[0,1],[1]]})");
    FAIL() << "expected ParseError";
  } catch (const ParseError& err) {
    EXPECT_NE(std::string(err.what()).find("edges[1]"), std::string::npos);
  }
}

TEST(ParseGraph, DotSubset) {
  Dag dag = parse_graph_dot(
      "digraph g {\n"
      "  a -> b [weight=1.5, c=0];\n"
      "  b -> c -> d;\n"
      "  e;\n"
      "}\n");
  EXPECT_EQ(dag.node_count(), 5);
  EXPECT_EQ(dag.labels()[0], "a");
  ASSERT_EQ(dag.edges().size(), 3u);
  EXPECT_DOUBLE_EQ(dag.edges()[0].weight, 1.5);
  EXPECT_DOUBLE_EQ(dag.edges()[1].weight, 1.0);  // defaults
  EXPECT_EQ(dag.edges()[1].diff_const, 0);

  Dag again = parse_graph_dot(write_graph_dot(dag));
  EXPECT_EQ(again.node_count(), dag.node_count());
  EXPECT_EQ(again.edges(), dag.edges());
}

TEST(ParseGraph, DotNegativeConstantAndTightSyntax) {
  Dag dag = parse_graph_dot("digraph{x->y[c=-1];}");
  ASSERT_EQ(dag.edges().size(), 1u);
  EXPECT_EQ(dag.edges()[0].diff_const, -1);
}

TEST(ParseGraph, DotErrorsCarryLocation) {
  try {
    parse_graph_dot("digraph g {\n  a -> ;\n}\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& err) {
    EXPECT_NE(std::string(err.what()).find("dot:2"), std::string::npos);
  }
}

TEST(ParseGraph, EdgeListSingleNode) {
  Dag dag = parse_graph_edgelist("0\n");
  EXPECT_EQ(dag.node_count(), 1);
  EXPECT_TRUE(dag.edges().empty());
}

TEST(ParseGraph, EdgeListSelfLoopRejected) {
  try {
    parse_graph_edgelist("0 1 1.0\n3 3 1.0\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& err) {
    std::string what = err.what();
    EXPECT_NE(what.find("edgelist:2"), std::string::npos);
    EXPECT_NE(what.find("self-loop"), std::string::npos);
  }
}

TEST(ParseGraph, EdgeListCommentsAndDiffConst) {
  Dag dag = parse_graph_edgelist(
      "# header comment\n"
      "0 1 2.5 -1\n"
      "1 2 1.0   # trailing comment\n"
      "\n");
  EXPECT_EQ(dag.node_count(), 3);
  EXPECT_EQ(dag.edges()[0].diff_const, -1);
  EXPECT_EQ(dag.edges()[1].diff_const, 0);

  Dag again = parse_graph_edgelist(write_graph_edgelist(dag));
  EXPECT_EQ(again.edges(), dag.edges());
}

TEST(RandomWorkload, TrivialAndDeterminism) {
  Dag one = generate_random_workload(1, 1.0, WeightDist::constant(1.0), 0);
  EXPECT_EQ(one.node_count(), 1);
  EXPECT_TRUE(one.edges().empty());

  Dag a = generate_random_workload(50, 0.1, WeightDist::uniform(0.5, 2.0), 7);
  Dag b = generate_random_workload(50, 0.1, WeightDist::uniform(0.5, 2.0), 7);
  EXPECT_EQ(write_graph_json(a), write_graph_json(b));  // byte-identical
}

TEST(RandomWorkload, CompleteDagEdgeCount) {
  Dag dag = generate_random_workload(10, 1.0, WeightDist::constant(1.0), 3);
  EXPECT_EQ(dag.edges().size(), 45u);  // C(10, 2) by enumeration
}

TEST(RandomWorkload, RejectsBadArguments) {
  EXPECT_THROW(generate_random_workload(0, 0.5, WeightDist::constant(1.0), 0),
               ParseError);
  EXPECT_THROW(generate_random_workload(5, 1.5, WeightDist::constant(1.0), 0),
               ParseError);
}

TEST(StageWindows, AllChainableMeansFullWindows) {
  for (const Dag& dag : {dfg7(), diamond(), chain(6, 0)}) {
    auto windows = stage_windows(dag, 10);
    for (const StageWindow& w : windows) {
      EXPECT_EQ(w.earliest, 0);
      EXPECT_EQ(w.latest, 9);
    }
  }
}

TEST(StageWindows, StrictChainPinsEveryNode) {
  auto windows = stage_windows(chain(3, -1), 3);
  EXPECT_EQ(windows[0].earliest, 0);
  EXPECT_EQ(windows[0].latest, 0);
  EXPECT_EQ(windows[1].earliest, 1);
  EXPECT_EQ(windows[1].latest, 1);
  EXPECT_EQ(windows[2].earliest, 2);
  EXPECT_EQ(windows[2].latest, 2);
}

TEST(StageWindows, InfeasibleLatencyThrows) {
  EXPECT_THROW(stage_windows(chain(3, -1), 2), InfeasibleError);
  EXPECT_THROW(stage_windows(chain(2, 0), 0), InfeasibleError);
}

TEST(StageWindows, EarliestAssignmentSatisfiesEverySdcConstraint) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Dag dag = testing::random_mixed_dag(30, 0.2, 10, seed);
    auto windows = stage_windows(dag, 10);
    Schedule earliest{10, {}};
    earliest.stages.reserve(dag.node_count());
    for (const StageWindow& w : windows) earliest.stages.push_back(w.earliest);
    EXPECT_TRUE(feasible(earliest, build_sdc(dag, 10)));
  }
}

TEST(StageWindows, PositiveConstantRelaxesChild) {
  Dag dag(2, {{0, 1, 1.0, 2}});  // s_0 - s_1 <= 2
  auto windows = stage_windows(dag, 4);
  EXPECT_EQ(windows[1].earliest, 0);
  EXPECT_EQ(windows[0].latest, 3);
}

}  // namespace
}  // namespace hsched
