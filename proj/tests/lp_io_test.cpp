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

#include "hsched/lp_io.hpp"

#include <gtest/gtest.h>

#include "hsched/ilp.hpp"
#include "test_util.hpp"

namespace hsched {
namespace {

using testing::chain;
using testing::dfg7;
using testing::diamond;

TEST(EmitLp, SingleNodeGolden) {
  IlpModel m = build_ilp(Dag(1, {}), 2, 1.0);
  const std::string expected =
      "\\ hsched time-indexed scheduling model\n"
      "Minimize\n"
      " obj: M\n"
      "Subject To\n"
      " assign_0: x_0_0 + x_0_1 = 1\n"
      " peak_0: x_0_0 - M <= 0\n"
      " peak_1: x_0_1 - M <= 0\n"
      "Bounds\n"
      " 1 <= M <= 1\n"
      "Binaries\n"
      " x_0_0 x_0_1\n"
      "End\n";
  EXPECT_EQ(emit_lp(m), expected);
}

TEST(EmitLp, NameCollisionRejected) {
  IlpModel m = build_ilp(Dag(1, {}), 2, 1.0);
  m.vars[1].name = m.vars[0].name;
  EXPECT_THROW(emit_lp(m), SolverError);
  EXPECT_THROW(emit_mps(m), SolverError);
}

TEST(EmitMps, RoundTripIsMatrixIdentical) {
  std::vector<Dag> dags = {Dag(1, {}),     dfg7(),       diamond(),
                           chain(3, -1),   chain(6, 0),  Dag(3, {})};
  std::vector<int> latencies = {2, 3, 4};
  int checked = 0;
  for (const Dag& dag : dags) {
    for (int latency : latencies) {
      if (!try_stage_windows(dag, latency)) continue;
      IlpModel m = build_ilp(dag, latency, 1.0);
      RawLinearModel parsed = parse_mps(emit_mps(m));
      EXPECT_TRUE(matrix_identical(raw_view(m), parsed))
          << "round trip mismatch at latency " << latency;
      ++checked;
    }
  }
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    Dag dag = testing::random_mixed_dag(10, 0.3, 4, seed);
    IlpModel m = build_ilp(dag, 4, 0.5);
    EXPECT_TRUE(matrix_identical(raw_view(m), parse_mps(emit_mps(m))));
    ++checked;
  }
  EXPECT_GE(checked, 20);
}

TEST(EmitMps, DetectsTamperedMatrix) {
  IlpModel m = build_ilp(diamond(), 2, 1.0);
  RawLinearModel a = raw_view(m);
  RawLinearModel b = parse_mps(emit_mps(m));
  EXPECT_TRUE(matrix_identical(a, b));
  b.rows[0].rhs += 1.0;
  EXPECT_FALSE(matrix_identical(a, b));
}

TEST(ParseMps, RejectsMalformedInput) {
  EXPECT_THROW(parse_mps("ROWS\n L  r0\n"), ParseError);  // missing ENDATA
  EXPECT_THROW(parse_mps("NAME x\nROWS\n Q  r0\nENDATA\n"), ParseError);
  EXPECT_THROW(parse_mps("NAME x\nCOLUMNS\n c r 1\nENDATA\n"), ParseError);
}

TEST(EmitMipStart, OneHotExpansionGolden) {
  IlpModel m = build_ilp(chain(3, 0), 3, 1.0);
  PartialSolution partial;
  partial.node_count = 3;
  partial.assignments[2] = 1;
  partial.confidences[2] = 0.9;
  EXPECT_EQ(emit_mip_start(partial, m),
            "x_2_0 0\n"
            "x_2_1 1\n"
            "x_2_2 0\n");
}

TEST(EmitMipStart, RejectsOutOfWindowAssignment) {
  IlpModel m = build_ilp(chain(3, -1), 3, 1.0);
  PartialSolution partial;
  partial.node_count = 3;
  partial.assignments[0] = 1;  // node 0 is pinned to stage 0
  EXPECT_THROW(emit_mip_start(partial, m), SolverError);

  PartialSolution unknown;
  unknown.node_count = 3;
  unknown.assignments[9] = 0;
  EXPECT_THROW(emit_mip_start(unknown, m), SolverError);
}

TEST(ParseSolution, ReadsColumnsSkipsComments) {
  IlpModel m = build_ilp(chain(2, 0), 2, 1.0);
  auto values = parse_solution_values(
      "# objective 1\n"
      "x_0_0 1\n"
      "x_1_0 1.0 extra-ignored\n"
      "M 2\n",
      m);
  Schedule s = schedule_from_assignment(m, values);
  EXPECT_EQ(s.stages, (std::vector<int>{0, 0}));
}

TEST(ParseSolution, Errors) {
  IlpModel m = build_ilp(chain(2, 0), 2, 1.0);
  EXPECT_THROW(parse_solution_values("bogus 1\n", m), ParseError);
  EXPECT_THROW(parse_solution_values("x_0_0\n", m), ParseError);
  EXPECT_THROW(parse_solution_values("x_0_0 abc\n", m), ParseError);

  auto both = parse_solution_values("x_0_0 1\nx_0_1 1\nx_1_0 1\n", m);
  EXPECT_THROW(schedule_from_assignment(m, both), ParseError);
  auto none = parse_solution_values("x_0_0 1\n", m);
  EXPECT_THROW(schedule_from_assignment(m, none), ParseError);
}

}  // namespace
}  // namespace hsched
