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

#include "hsched/warmstart.hpp"

#include <gtest/gtest.h>

#include <algorithm>

#include "hsched/diffsched.hpp"
#include "test_util.hpp"

namespace hsched {
namespace {

IterationRecord record_with_confidences(const std::vector<int>& stages,
                                        const std::vector<double>& confidence,
                                        int latency) {
  IterationRecord rec;
  rec.iteration = 1;
  rec.latency = latency;
  rec.schedule = Schedule{latency, stages};
  rec.confidence = confidence;
  rec.confidence_stage = stages;
  return rec;
}

TEST(ExtractPartial, SelectsNodesAtOrAboveThreshold) {
  // The worked confidence example: P' = [0, 0.2, 0.3] gives C = 0.3 at
  // stage 2, which a threshold of 0.3 must select.
  IterationRecord rec = record_with_confidences({2, 0}, {0.3, 0.1}, 3);
  PartialSolution partial = extract_partial(rec, 0.3);
  ASSERT_EQ(partial.assignments.size(), 1u);
  EXPECT_EQ(partial.assignments.at(0), 2);
  EXPECT_DOUBLE_EQ(partial.confidences.at(0), 0.3);
}

TEST(ExtractPartial, ZeroThresholdKeepsEveryNode) {
  IterationRecord rec =
      record_with_confidences({0, 1, 2, 0}, {0.4, 0.2, 0.9, 0.1}, 3);
  PartialSolution partial = extract_partial(rec, 0.0);
  EXPECT_EQ(partial.assignments.size(), 4u);
  EXPECT_DOUBLE_EQ(partial.coverage(), 1.0);
}

TEST(ExtractPartial, ThresholdOneKeepsOnlyDegenerateNodes) {
  DiffConfig cfg;
  cfg.seed = 13;
  DiffOptimizer opt(testing::chain(3, -1), 3, cfg);
  auto rec = opt.forward_pass();
  PartialSolution partial = extract_partial(rec, 1.0);
  // All three nodes are pinned by their windows, hence degenerate.
  EXPECT_EQ(partial.assignments.size(), 3u);

  Dag loose(2, {});
  DiffOptimizer opt2(loose, 3, cfg);
  auto rec2 = opt2.forward_pass();
  EXPECT_TRUE(extract_partial(rec2, 1.0).assignments.empty());
}

TEST(ExtractPartial, MonotoneInThreshold) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Dag dag = testing::random_mixed_dag(30, 0.2, 5, seed);
    DiffConfig cfg;
    cfg.seed = seed;
    DiffOptimizer opt(dag, 5, cfg);
    auto rec = opt.forward_pass();
    PartialSolution lo = extract_partial(rec, 0.2);
    PartialSolution hi = extract_partial(rec, 0.5);
    for (const auto& [node, stage] : hi.assignments) {
      ASSERT_TRUE(lo.assignments.count(node));
      EXPECT_EQ(lo.assignments.at(node), stage);
    }
  }
}

TEST(AutoThreshold, ConstantPoolReturnsTheConstant) {
  IterationRecord rec =
      record_with_confidences({0, 0, 0}, {0.4, 0.4, 0.4}, 2);
  for (double q : {10.0, 50.0, 70.0, 99.0}) {
    EXPECT_DOUBLE_EQ(auto_threshold({rec}, q), 0.4);
  }
}

TEST(AutoThreshold, NearestRankOnDeciles) {
  std::vector<double> deciles = {0.1, 0.2, 0.3, 0.4, 0.5,
                                 0.6, 0.7, 0.8, 0.9, 1.0};
  IterationRecord rec = record_with_confidences(
      std::vector<int>(10, 0), deciles, 2);
  EXPECT_DOUBLE_EQ(auto_threshold({rec}, 70.0), 0.7);
  EXPECT_DOUBLE_EQ(auto_threshold({rec}, 95.0), 1.0);
  EXPECT_DOUBLE_EQ(auto_threshold({rec}, 5.0), 0.1);
}

TEST(AutoThreshold, PermutationInvariantOverRecords) {
  IterationRecord a = record_with_confidences({0, 0}, {0.9, 0.1}, 2);
  IterationRecord b = record_with_confidences({0, 0}, {0.5, 0.7}, 2);
  IterationRecord c = record_with_confidences({0, 0}, {0.3, 0.2}, 2);
  EXPECT_DOUBLE_EQ(auto_threshold({a, b, c}, 70.0),
                   auto_threshold({c, a, b}, 70.0));
}

TEST(AutoThreshold, NearestRankPropertyOnRandomPools) {
  SplitRng rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    int size = 1 + static_cast<int>(rng.below(40));
    std::vector<double> pool(size);
    for (double& v : pool) v = rng.uniform();
    double q = 1.0 + 98.0 * rng.uniform();
    double tau = nearest_rank_percentile(pool, q);
    // Oracle: tau is the smallest pool value with at least q% of the pool
    // at or below it.
    long at_or_below = std::count_if(pool.begin(), pool.end(),
                                     [&](double v) { return v <= tau; });
    EXPECT_GE(100.0 * at_or_below / size, q - 1e-9);
    long strictly_below = std::count_if(pool.begin(), pool.end(),
                                        [&](double v) { return v < tau; });
    EXPECT_LT(100.0 * strictly_below / size, q + 1e-9);
  }
}

TEST(ThresholdPolicy, Validation) {
  EXPECT_THROW(ThresholdPolicy::fixed(1.5), std::invalid_argument);
  EXPECT_THROW(ThresholdPolicy::percentile(0.0), std::invalid_argument);
  EXPECT_NO_THROW(ThresholdPolicy::fixed(0.2));
  EXPECT_NO_THROW(ThresholdPolicy::percentile(70.0));
}

TEST(ConsistencyFilter, SamplerOutputPassesUnchanged) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Dag dag = testing::random_mixed_dag(25, 0.25, 5, seed);
    SdcSystem sdc = build_sdc(dag, 5);
    DiffConfig cfg;
    cfg.seed = seed;
    DiffOptimizer opt(dag, 5, cfg);
    auto rec = opt.forward_pass();
    PartialSolution partial = extract_partial(rec, 0.2);
    PartialSolution filtered = consistency_filter(partial, sdc);
    EXPECT_EQ(filtered.assignments, partial.assignments);
  }
}

TEST(ConsistencyFilter, DropsLowerConfidenceEndpoint) {
  Dag dag = testing::chain(2, -1);  // s_0 - s_1 <= -1
  SdcSystem sdc = build_sdc(dag, 3);
  PartialSolution partial;
  partial.node_count = 2;
  partial.assignments = {{0, 2}, {1, 0}};  // violates strict precedence
  partial.confidences = {{0, 0.9}, {1, 0.2}};
  PartialSolution filtered = consistency_filter(partial, sdc);
  EXPECT_EQ(filtered.assignments.size(), 1u);
  EXPECT_TRUE(filtered.assignments.count(0));   // high confidence survives
  EXPECT_FALSE(filtered.assignments.count(1));  // low confidence dropped
}

TEST(ConsistencyFilter, CascadesToFixpoint) {
  // 0 -> 1 -> 2 strict chain, all three pinned infeasibly close.
  Dag dag = testing::chain(3, -1);
  SdcSystem sdc = build_sdc(dag, 3);
  PartialSolution partial;
  partial.node_count = 3;
  partial.assignments = {{0, 2}, {1, 1}, {2, 0}};
  partial.confidences = {{0, 0.9}, {1, 0.5}, {2, 0.4}};
  PartialSolution filtered = consistency_filter(partial, sdc);
  for (const SdcConstraint& con : sdc.constraints) {
    auto it = filtered.assignments.find(con.i);
    auto jt = filtered.assignments.find(con.j);
    if (it != filtered.assignments.end() && jt != filtered.assignments.end()) {
      EXPECT_LE(it->second - jt->second, con.c);
    }
  }
  EXPECT_TRUE(filtered.assignments.count(0));
}

TEST(ConsistencyFilter, EmptyPartialStaysEmpty) {
  SdcSystem sdc = build_sdc(testing::chain(2, 0), 2);
  PartialSolution partial;
  partial.node_count = 2;
  EXPECT_TRUE(consistency_filter(partial, sdc).assignments.empty());
}

}  // namespace
}  // namespace hsched
