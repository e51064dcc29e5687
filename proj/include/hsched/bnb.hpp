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

#ifndef HSCHED_BNB_HPP_
#define HSCHED_BNB_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#include "hsched/objective.hpp"
#include "hsched/solve.hpp"
#include "hsched/warmstart.hpp"

namespace hsched {

namespace detail {

/// Depth-first branch and bound over the stage variables.
///
/// Nodes are branched in topological order, so a node's committed
/// predecessors fully determine its dynamic stage domain. The bound below a
/// partial assignment combines the exact pigeonhole/committed-load peak
/// bound with the committed crossing cost plus an admissible remainder: for
/// every edge whose destination is still open, the destination can sit no
/// earlier than its static ASAP stage, and an uncommitted source no later
/// than its static ALAP stage. Warm starts become the initial incumbent via
/// greedy completion and never constrain the search.
class BranchAndBound {
 public:
  BranchAndBound(const SolverRequest& request)
      : m_(request.model),
        dag_(m_.dag),
        latency_(m_.latency),
        n_(dag_.node_count()),
        seed_(request.seed),
        budget_s_(request.time_budget_s),
        denom_(peak_floor(n_, latency_)),
        wsum_(dag_.total_edge_weight()) {}

  SolveReport run() {
    if (budget_s_ <= 0) {
      throw std::invalid_argument("time budget must be positive");
    }
    start_ = std::chrono::steady_clock::now();
    stage_.assign(n_, -1);
    load_.assign(latency_, 0);
    peak_committed_ = 0;
    comm_committed_ = 0.0;

    // Remainder bound seed: every edge still open, uncommitted sources at
    // their ALAP stages.
    future_ = 0.0;
    for (const Edge& e : dag_.edges()) {
      future_ += e.weight * std::max(0, m_.windows[e.dst].earliest -
                                            m_.windows[e.src].latest);
    }
    root_bound_ = bound();

    if (request_has_hint()) seed_incumbent();

    aborted_ = false;
    descend(0);

    SolveReport report;
    report.incumbent_trace = trace_;
    report.runtime_s = elapsed();
    if (!aborted_) {
      if (best_schedule_.stages.empty()) {
        report.status = SolveStatus::kInfeasible;
        report.diagnostics = "search exhausted without a feasible assignment";
        return report;
      }
      report.status = SolveStatus::kOptimal;
      report.best_bound = incumbent_;
      report.gap = 0.0;
    } else if (!best_schedule_.stages.empty()) {
      report.status = SolveStatus::kFeasible;
      report.best_bound = root_bound_;
      report.gap = (incumbent_ - root_bound_) /
                   std::max(std::abs(incumbent_), 1e-12);
    } else {
      report.status = SolveStatus::kTimeoutNoIncumbent;
      report.best_bound = root_bound_;
      return report;
    }
    report.schedule = best_schedule_;
    ObjectiveBreakdown breakdown =
        evaluate_objective(best_schedule_, dag_, m_.alpha);
    report.objective = breakdown.combined;
    report.normalized_pct = breakdown.normalized_pct;
    return report;
  }

  /// Greedy completion of a (filtered) hint: hinted stages are kept where
  /// they are dynamically feasible, everything else follows the list
  /// scheduler's rule. Always yields a feasible schedule.
  void set_hint(PartialSolution hint) { hint_ = std::move(hint); }

 private:
  bool request_has_hint() const { return !hint_.assignments.empty(); }

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

  bool deadline_hit() {
    if ((++poll_ & 1023) == 0) aborted_ = aborted_ || elapsed() >= budget_s_;
    return aborted_;
  }

  double bound() const {
    double peak = std::max(peak_committed_, denom_);
    double value = m_.alpha * peak / denom_;
    if (wsum_ > 0) value += (comm_committed_ + future_) / wsum_;
    return value;
  }

  int dynamic_low(int v) const {
    int lo = m_.windows[v].earliest;
    for (int k : dag_.in_edges(v)) {
      const Edge& e = dag_.edges()[k];
      lo = std::max(lo, stage_[e.src] - e.diff_const);
    }
    return lo;
  }

  void commit(int v, int a) {
    stage_[v] = a;
    ++load_[a];
    peak_stack_.push_back(peak_committed_);
    peak_committed_ = std::max(peak_committed_, load_[a]);
    for (int k : dag_.in_edges(v)) {
      const Edge& e = dag_.edges()[k];
      comm_committed_ += e.weight * std::max(0, a - stage_[e.src]);
      future_ -= e.weight * std::max(0, m_.windows[v].earliest - stage_[e.src]);
    }
    for (int k : dag_.out_edges(v)) {
      const Edge& e = dag_.edges()[k];
      future_ += e.weight * (std::max(0, m_.windows[e.dst].earliest - a) -
                             std::max(0, m_.windows[e.dst].earliest -
                                             m_.windows[v].latest));
    }
  }

  void uncommit(int v, int a) {
    for (int k : dag_.out_edges(v)) {
      const Edge& e = dag_.edges()[k];
      future_ -= e.weight * (std::max(0, m_.windows[e.dst].earliest - a) -
                             std::max(0, m_.windows[e.dst].earliest -
                                             m_.windows[v].latest));
    }
    for (int k : dag_.in_edges(v)) {
      const Edge& e = dag_.edges()[k];
      comm_committed_ -= e.weight * std::max(0, a - stage_[e.src]);
      future_ += e.weight * std::max(0, m_.windows[v].earliest - stage_[e.src]);
    }
    peak_committed_ = peak_stack_.back();
    peak_stack_.pop_back();
    --load_[a];
    stage_[v] = -1;
  }

  double added_cross(int v, int a) const {
    double cross = 0.0;
    for (int k : dag_.in_edges(v)) {
      const Edge& e = dag_.edges()[k];
      cross += e.weight * std::max(0, a - stage_[e.src]);
    }
    return cross;
  }

  /// Candidate stages for `v`, heuristic-preferred first. A nonzero lane
  /// seed jitters the load component, which diversifies the first dives of
  /// otherwise identical cold lanes.
  std::vector<int> ordered_domain(int v) {
    int lo = dynamic_low(v);
    int hi = m_.windows[v].latest;
    struct Scored {
      double load;
      double cross;
      int stage;
    };
    std::vector<Scored> scored;
    for (int a = lo; a <= hi; ++a) {
      double jitter = 0.0;
      if (seed_ != 0) {
        std::uint64_t h = mix_u64(seed_ ^ (static_cast<std::uint64_t>(v) *
                                               latency_ +
                                           a));
        jitter = 0.75 * static_cast<double>(h >> 11) * 0x1.0p-53;
      }
      scored.push_back({load_[a] + jitter, added_cross(v, a), a});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& x, const Scored& y) {
      if (x.load != y.load) return x.load < y.load;
      if (x.cross != y.cross) return x.cross < y.cross;
      return x.stage < y.stage;
    });
    std::vector<int> out;
    out.reserve(scored.size());
    for (const Scored& s : scored) out.push_back(s.stage);
    return out;
  }

  void record_incumbent(const Schedule& schedule, double objective) {
    incumbent_ = objective;
    best_schedule_ = schedule;
    trace_.push_back({elapsed(), objective});
  }

  /// Exact objective of a complete assignment, computed canonically so
  /// reported values match evaluate_objective bit for bit.
  double canonical_objective(const Schedule& schedule) const {
    int peak = 0;
    double comm = 0.0;
    detail::raw_costs(schedule, dag_, &peak, &comm);
    return detail::combine(peak, comm, dag_, latency_, m_.alpha);
  }

  void seed_incumbent() {
    PartialSolution hint = consistency_filter(hint_, build_sdc(dag_, latency_));
    Schedule schedule{latency_, std::vector<int>(n_, 0)};
    std::vector<int> load(latency_, 0);
    std::vector<int> stage(n_, -1);
    for (int v : dag_.topological_order()) {
      int lo = m_.windows[v].earliest;
      for (int k : dag_.in_edges(v)) {
        const Edge& e = dag_.edges()[k];
        lo = std::max(lo, stage[e.src] - e.diff_const);
      }
      int hi = m_.windows[v].latest;
      int pick = -1;
      auto hinted = hint.assignments.find(v);
      if (hinted != hint.assignments.end() && hinted->second >= lo &&
          hinted->second <= hi) {
        pick = hinted->second;
      } else {
        int best_load = std::numeric_limits<int>::max();
        double best_cross = 0.0;
        for (int a = lo; a <= hi; ++a) {
          double cross = 0.0;
          for (int k : dag_.in_edges(v)) {
            const Edge& e = dag_.edges()[k];
            cross += e.weight * std::max(0, a - stage[e.src]);
          }
          if (load[a] < best_load ||
              (load[a] == best_load && cross < best_cross)) {
            pick = a;
            best_load = load[a];
            best_cross = cross;
          }
        }
      }
      stage[v] = pick;
      ++load[pick];
      schedule.stages[v] = pick;
    }
    record_incumbent(schedule, canonical_objective(schedule));
  }

  void descend(int depth) {
    if (aborted_) return;
    if (depth == n_) {
      Schedule leaf{latency_, stage_};
      double objective = canonical_objective(leaf);
      if (objective < incumbent_) record_incumbent(leaf, objective);
      return;
    }
    if (deadline_hit()) return;
    int v = dag_.topological_order()[depth];
    for (int a : ordered_domain(v)) {
      commit(v, a);
      if (bound() < incumbent_ - kPruneMargin) descend(depth + 1);
      uncommit(v, a);
      if (aborted_) return;
    }
  }

  static constexpr double kPruneMargin = 1e-9;

  IlpModel m_;
  const Dag& dag_;
  int latency_;
  int n_;
  std::uint64_t seed_;
  double budget_s_;
  int denom_;
  double wsum_;
  PartialSolution hint_;

  std::chrono::steady_clock::time_point start_;
  std::vector<int> stage_;
  std::vector<int> load_;
  std::vector<int> peak_stack_;
  int peak_committed_ = 0;
  double comm_committed_ = 0.0;
  double future_ = 0.0;
  double root_bound_ = 0.0;
  double incumbent_ = std::numeric_limits<double>::infinity();
  Schedule best_schedule_;
  std::vector<std::pair<double, double>> trace_;
  std::uint64_t poll_ = 0;
  bool aborted_ = false;
};

}  // namespace detail

/// Exact solve with the internal branch and bound. Optimality certificates
/// are realistic at desk scale (tens of nodes); beyond that the solver is
/// anytime and reports the best incumbent at the deadline.
inline SolveReport solve_internal(const SolverRequest& request) {
  detail::BranchAndBound solver(request);
  if (request.warm_start) solver.set_hint(*request.warm_start);
  return solver.run();
}

/// Builds the model and solves internally, mapping an infeasible latency to
/// a report instead of an exception.
inline SolveReport solve_internal(const Dag& dag, int latency, double alpha,
                                  double budget_s,
                                  std::optional<PartialSolution> hint = {},
                                  std::uint64_t seed = 0) {
  SolverRequest request;
  try {
    request.model = build_ilp(dag, latency, alpha);
  } catch (const InfeasibleError& err) {
    SolveReport report;
    report.status = SolveStatus::kInfeasible;
    report.diagnostics = err.what();
    return report;
  }
  request.warm_start = std::move(hint);
  request.time_budget_s = budget_s;
  request.seed = seed;
  return solve_internal(request);
}

}  // namespace hsched

#endif  // HSCHED_BNB_HPP_
