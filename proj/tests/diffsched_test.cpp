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

#include "hsched/diffsched.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "hsched/objective.hpp"
#include "hsched/workload.hpp"
#include "test_util.hpp"

namespace hsched {
namespace {

using testing::chain;

// Direct-definition oracle: stage a is allowed iff a >= parent_stage - c.
std::vector<std::uint8_t> mask_oracle(int parent_stage, int c, int latency) {
  std::vector<std::uint8_t> mask(latency, 0);
  for (int a = 0; a < latency; ++a) {
    if (a >= parent_stage - c) mask[a] = 1;
  }
  return mask;
}

TEST(MaskLeq, WorkedExample) {
  EXPECT_EQ(mask_leq({0, 1, 0}, 0), (std::vector<std::uint8_t>{0, 1, 1}));
  EXPECT_EQ(mask_leq({1, 0, 0}, 0), (std::vector<std::uint8_t>{1, 1, 1}));
  EXPECT_EQ(mask_leq({0, 1, 0}, -1), (std::vector<std::uint8_t>{0, 0, 1}));
}

TEST(MaskLeq, FullTruthTableAgainstDirectDefinition) {
  for (int latency = 1; latency <= 5; ++latency) {
    for (int stage = 0; stage < latency; ++stage) {
      std::vector<std::uint8_t> onehot(latency, 0);
      onehot[stage] = 1;
      for (int c = -3; c <= 3; ++c) {
        EXPECT_EQ(mask_leq(onehot, c), mask_oracle(stage, c, latency))
            << "latency=" << latency << " stage=" << stage << " c=" << c;
      }
    }
  }
}

TEST(MaskLeq, FullyShiftedOutSignalsInfeasibility) {
  auto mask = mask_leq({0, 0, 1}, -1);  // parent at last stage, strict edge
  EXPECT_EQ(mask, (std::vector<std::uint8_t>{0, 0, 0}));
}

TEST(MaskLeq, RejectsNonOneHot) {
  EXPECT_THROW(mask_leq({0, 0, 0}, 0), std::invalid_argument);
  EXPECT_THROW(mask_leq({1, 1, 0}, 0), std::invalid_argument);
}

TEST(Init, UniformRowsWithTinyNoise) {
  DiffConfig cfg;
  cfg.seed = 11;
  DiffOptimizer opt(Dag(1, {}), 3, cfg);
  std::vector<std::uint8_t> all(3, 1);
  auto s = opt.constrained_sample(0, all, 1.0);
  for (int a = 0; a < 3; ++a) EXPECT_NEAR(s.probs[a], 1.0 / 3.0, 2e-3);
}

TEST(Init, DeterministicForFixedSeed) {
  DiffConfig cfg;
  cfg.seed = 42;
  DiffOptimizer a(testing::dfg7(), 4, cfg);
  DiffOptimizer b(testing::dfg7(), 4, cfg);
  EXPECT_EQ(a.logits(), b.logits());
}

TEST(Init, WindowForcedNodeIsDegenerate) {
  // Strict chain pins node 2 to stage 2: its confidence vector must be
  // exactly [0, 0, 1].
  DiffConfig cfg;
  DiffOptimizer opt(chain(3, -1), 3, cfg);
  auto rec = opt.forward_pass();
  EXPECT_DOUBLE_EQ(rec.probs[2 * 3 + 0], 0.0);
  EXPECT_DOUBLE_EQ(rec.probs[2 * 3 + 1], 0.0);
  EXPECT_DOUBLE_EQ(rec.probs[2 * 3 + 2], 1.0);
  EXPECT_DOUBLE_EQ(rec.confidence[2], 1.0);
}

TEST(ConstrainedSample, PaperConfidenceExample) {
  Dag dag(2, {{0, 1, 1.0, 0}});
  DiffConfig cfg;
  DiffOptimizer opt(dag, 3, cfg);
  auto logits = opt.logits();
  logits[1 * 3 + 0] = std::log(0.5);
  logits[1 * 3 + 1] = std::log(0.2);
  logits[1 * 3 + 2] = std::log(0.3);
  opt.set_logits(logits);

  std::vector<std::uint8_t> parent_mask{0, 1, 1};
  auto s = opt.constrained_sample(1, parent_mask, 1.0);
  EXPECT_NEAR(s.probs[0], 0.0, 0.0);
  EXPECT_NEAR(s.probs[1], 0.2, 1e-12);
  EXPECT_NEAR(s.probs[2], 0.3, 1e-12);
  double confidence = *std::max_element(s.probs.begin(), s.probs.end());
  EXPECT_NEAR(confidence, 0.3, 1e-12);
  EXPECT_EQ(std::max_element(s.probs.begin(), s.probs.end()) - s.probs.begin(),
            2);
  EXPECT_TRUE(s.stage == 1 || s.stage == 2);  // sample stays inside the mask
  EXPECT_DOUBLE_EQ(s.soft[0], 0.0);
}

TEST(ConstrainedSample, ForcedMaskIgnoresNoise) {
  DiffConfig cfg;
  cfg.seed = 5;
  DiffOptimizer opt(Dag(1, {}), 3, cfg);
  std::vector<std::uint8_t> forced{0, 0, 1};
  for (int k = 0; k < 50; ++k) {
    auto s = opt.constrained_sample(0, forced, 1.0);
    EXPECT_EQ(s.stage, 2);
    EXPECT_DOUBLE_EQ(s.soft[2], 1.0);
  }
}

TEST(ConstrainedSample, HardSampleFrequenciesMatchSoftmax) {
  // The argmax of logits + Gumbel noise is a categorical draw from
  // softmax(logits) at any temperature; check the empirical frequencies.
  DiffConfig cfg;
  cfg.seed = 123;
  DiffOptimizer opt(Dag(1, {}), 3, cfg);
  std::vector<double> logits = {std::log(0.6), std::log(0.1), std::log(0.3)};
  opt.set_logits(logits);
  std::vector<std::uint8_t> all(3, 1);
  std::vector<int> counts(3, 0);
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) {
    ++counts[opt.constrained_sample(0, all, 0.1).stage];
  }
  EXPECT_NEAR(counts[0] / double(draws), 0.6, 0.01);
  EXPECT_NEAR(counts[1] / double(draws), 0.1, 0.01);
  EXPECT_NEAR(counts[2] / double(draws), 0.3, 0.01);
}

TEST(ForwardPass, EdgelessGraphHasAllOnesMasks) {
  DiffConfig cfg;
  cfg.seed = 3;
  DiffOptimizer opt(Dag(4, {}), 3, cfg);
  auto rec = opt.forward_pass();
  for (std::uint8_t m : rec.mask) EXPECT_EQ(m, 1);
}

TEST(ForwardPass, StrictChainAlwaysSamplesTheOnlySchedule) {
  DiffConfig cfg;
  cfg.seed = 9;
  DiffOptimizer opt(chain(3, -1), 3, cfg);
  for (int k = 0; k < 20; ++k) {
    auto rec = opt.forward_pass();
    EXPECT_EQ(rec.schedule.stages, (std::vector<int>{0, 1, 2}));
  }
}

TEST(ForwardPass, SampledSchedulesAreAlwaysFeasible) {
  int passes = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Dag dag = testing::random_mixed_dag(50, 0.15, 10, seed);
    SdcSystem sdc = build_sdc(dag, 10);
    DiffConfig cfg;
    cfg.seed = seed;
    DiffOptimizer opt(dag, 10, cfg);
    for (int k = 0; k < 10; ++k) {
      auto rec = opt.forward_pass();
      ASSERT_TRUE(feasible(rec.schedule, sdc));
      ++passes;
    }
  }
  EXPECT_EQ(passes, 200);
}

TEST(ForwardPass, ConfidencesLieInUnitInterval) {
  DiffConfig cfg;
  cfg.seed = 17;
  Dag dag = testing::random_mixed_dag(30, 0.2, 6, 4);
  DiffOptimizer opt(dag, 6, cfg);
  auto rec = opt.forward_pass();
  for (double c : rec.confidence) {
    EXPECT_GE(c, 0.0);
    EXPECT_LE(c, 1.0);
  }
}

// Builds a record with prescribed one-hot rows (test scaffolding for the
// loss functions).
IterationRecord record_with_onehot_rows(const std::vector<int>& stages,
                                        int latency) {
  IterationRecord rec;
  rec.latency = latency;
  rec.schedule = Schedule{latency, stages};
  rec.soft.assign(stages.size() * latency, 0.0);
  rec.mask.assign(stages.size() * latency, 1);
  for (std::size_t v = 0; v < stages.size(); ++v) {
    rec.soft[v * latency + stages[v]] = 1.0;
  }
  return rec;
}

TEST(LossResource, UniformOccupancyHitsMaximumEntropy) {
  // 6 nodes over 3 stages, 2 per stage: H = log 3 exactly.
  IterationRecord rec = record_with_onehot_rows({0, 0, 1, 1, 2, 2}, 3);
  EXPECT_NEAR(loss_resource(rec, EntropySign::kBalance), -std::log(3.0), 1e-12);
  EXPECT_NEAR(loss_resource(rec, EntropySign::kPaperLiteral), std::log(3.0),
              1e-12);
}

TEST(LossResource, SingleStageOccupancyHasZeroEntropy) {
  IterationRecord rec = record_with_onehot_rows({0, 0, 0, 0}, 3);
  EXPECT_DOUBLE_EQ(loss_resource(rec, EntropySign::kBalance), 0.0);
}

TEST(LossResource, HandComputedOccupancy) {
  // Occupancy (2, 1, 1) over 4 nodes: H = -sum p log p = 1.0397...
  IterationRecord rec = record_with_onehot_rows({0, 0, 1, 2}, 3);
  EXPECT_NEAR(-loss_resource(rec, EntropySign::kBalance), 1.0397, 1e-4);
}

TEST(LossComm, AllNodesOnOneStageCostsNothing) {
  Dag dag = testing::dfg7();
  IterationRecord rec = record_with_onehot_rows({0, 0, 0, 0, 0, 0, 0}, 3);
  EXPECT_DOUBLE_EQ(loss_comm(rec, dag), 0.0);
}

TEST(LossComm, SpanningEdgeCountsEveryBoundary) {
  Dag dag(2, {{0, 1, 1.0, 0}});
  IterationRecord rec = record_with_onehot_rows({0, 2}, 3);
  EXPECT_DOUBLE_EQ(loss_comm(rec, dag), 2.0);  // m_0 = m_1 = 1, sum(w) = 1
}

TEST(LossComm, ZeroTotalWeightIsDefinedAsZero) {
  Dag dag(2, {{0, 1, 0.0, 0}});
  IterationRecord rec = record_with_onehot_rows({0, 2}, 3);
  EXPECT_DOUBLE_EQ(loss_comm(rec, dag), 0.0);
}

TEST(LossComm, OneHotInputsMatchExactCrossingCost) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Dag dag = testing::random_mixed_dag(20, 0.25, 5, seed);
    DiffConfig cfg;
    cfg.seed = seed;
    DiffOptimizer opt(dag, 5, cfg);
    IterationRecord sampled = opt.forward_pass();
    IterationRecord onehot =
        record_with_onehot_rows(sampled.schedule.stages, 5);
    double exact = evaluate_objective(sampled.schedule, dag, 1.0).comm;
    EXPECT_NEAR(loss_comm(onehot, dag) * dag.total_edge_weight(), exact, 1e-9);
  }
}

TEST(LossBounds, ResourceAndCommStayInRange) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Dag dag = testing::random_mixed_dag(25, 0.2, 6, seed);
    DiffConfig cfg;
    cfg.seed = seed;
    DiffOptimizer opt(dag, 6, cfg);
    auto rec = opt.forward_pass();
    EXPECT_GE(rec.loss_resource, -std::log(6.0) - 1e-12);
    EXPECT_LE(rec.loss_resource, 0.0 + 1e-12);
    EXPECT_GE(rec.loss_comm, 0.0);
    EXPECT_LE(rec.loss_comm, 5.0);
  }
}

TEST(Step, NoObjectivePressureLeavesLogitsUntouched) {
  Dag dag(3, {{0, 1, 0.0, 0}, {1, 2, 0.0, 0}});  // zero edge weights
  DiffConfig cfg;
  cfg.lambda = 0.0;
  cfg.seed = 2;
  DiffOptimizer opt(dag, 3, cfg);
  auto before = opt.logits();
  auto rec = opt.forward_pass();
  opt.step(rec);
  EXPECT_EQ(opt.logits(), before);  // bit-identical
}

TEST(Step, DeterministicAcrossRuns) {
  Dag dag = testing::random_mixed_dag(15, 0.3, 4, 8);
  DiffConfig cfg;
  cfg.seed = 77;
  cfg.iterations = 10;
  DiffOptimizer a(dag, 4, cfg);
  DiffOptimizer b(dag, 4, cfg);
  a.run();
  b.run();
  EXPECT_EQ(a.logits(), b.logits());  // bit-identical after 10 steps
}

TEST(Step, AnalyticGradientMatchesCentralDifferences) {
  const double eps = 1e-4;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Dag dag = testing::random_mixed_dag(5, 0.5, 3, seed);
    DiffConfig cfg;
    cfg.lambda = 2.0;
    cfg.seed = seed + 1;
    DiffOptimizer opt(dag, 3, cfg);
    auto rec = opt.forward_pass();
    auto analytic = opt.gradient(rec);
    auto logits = opt.logits();
    double worst = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
      auto perturbed = logits;
      perturbed[i] = logits[i] + eps;
      auto [rp, cp] = opt.losses_with(perturbed, rec);
      perturbed[i] = logits[i] - eps;
      auto [rm, cm] = opt.losses_with(perturbed, rec);
      double fd = (cfg.lambda * rp + cp - cfg.lambda * rm - cm) / (2 * eps);
      double rel = std::abs(analytic[i] - fd) /
                   std::max({std::abs(analytic[i]), std::abs(fd), 1e-6});
      worst = std::max(worst, rel);
    }
    EXPECT_LE(worst, 1e-3) << "seed " << seed;
  }
}

TEST(Step, NonFiniteGradientFaults) {
  Dag dag(2, {{0, 1, 1.0, 0}});
  DiffConfig cfg;
  DiffOptimizer opt(dag, 2, cfg);
  auto rec = opt.forward_pass();
  rec.soft[0] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(opt.step(rec), SolverError);
}

TEST(Run, SingleIterationYieldsSingleRecord) {
  DiffConfig cfg;
  cfg.iterations = 1;
  auto records = run_diffsched(testing::dfg7(), 3, cfg);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].iteration, 1);
}

TEST(Run, ForcedInstanceRepeatsTheUniqueSchedule) {
  DiffConfig cfg;
  cfg.iterations = 8;
  auto records = run_diffsched(chain(4, -1), 4, cfg);
  for (const auto& rec : records) {
    EXPECT_EQ(rec.schedule.stages, (std::vector<int>{0, 1, 2, 3}));
  }
}

TEST(Run, CompositeLossImprovesOnMostSeeds) {
  int improved = 0;
  const int trials = 20;
  for (std::uint64_t seed = 0; seed < trials; ++seed) {
    Dag dag = generate_random_workload(200, 0.05, WeightDist::uniform(0.5, 2.0),
                                       seed);
    DiffConfig cfg;
    cfg.iterations = 30;
    cfg.lambda = 10.0;
    cfg.seed = seed;
    auto records = run_diffsched(dag, 10, cfg);
    if (records.back().loss_total <= records.front().loss_total) ++improved;
  }
  EXPECT_GE(improved, trials * 9 / 10);
}

}  // namespace
}  // namespace hsched
