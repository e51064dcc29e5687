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

#ifndef HSCHED_RACE_HPP_
#define HSCHED_RACE_HPP_

#include <optional>
#include <semaphore>
#include <string>
#include <thread>
#include <vector>

#include "hsched/bnb.hpp"
#include "hsched/external.hpp"
#include "hsched/solve.hpp"

namespace hsched {

/// One racing lane: an optional non-binding hint plus a lane seed. Lanes
/// without a hint reproduce the cold-start baseline protocol (independently
/// seeded solvers racing in parallel).
struct LaneSpec {
  std::optional<PartialSolution> hint;
  std::uint64_t seed = 0;
  std::string label;
};

struct RaceResult {
  std::vector<SolveReport> reports;
  int best_index = -1;
  double j_star = std::numeric_limits<double>::infinity();

  const SolveReport& best() const { return reports[best_index]; }
};

/// Runs every lane as an isolated worker (own model copy, own deadline) and
/// keeps the best objective: J* = min over lanes that produced a schedule.
/// `max_threads` caps how many lanes run at once; lanes beyond the cap wait
/// their turn and still receive the full per-lane budget once started.
/// Throws SolverError only when every lane failed.
inline RaceResult race(const IlpModel& model, const std::vector<LaneSpec>& lanes,
                       double budget_s, int max_threads,
                       const ExternalBackend* external = nullptr) {
  if (lanes.empty()) throw std::invalid_argument("race needs at least one lane");
  if (max_threads < 1) throw std::invalid_argument("race needs threads >= 1");

  RaceResult result;
  result.reports.resize(lanes.size());
  std::vector<std::string> failures(lanes.size());
  std::counting_semaphore<1 << 20> gate(max_threads);
  std::vector<std::thread> workers;
  workers.reserve(lanes.size());

  for (std::size_t i = 0; i < lanes.size(); ++i) {
    workers.emplace_back([&, i] {
      gate.acquire();
      try {
        SolverRequest request;
        request.model = model;  // per-lane copy
        request.warm_start = lanes[i].hint;
        request.time_budget_s = budget_s;
        request.seed = lanes[i].seed;
        result.reports[i] = external ? solve_external(request, *external)
                                     : solve_internal(request);
      } catch (const std::exception& err) {
        failures[i] = err.what();
        result.reports[i].status = SolveStatus::kTimeoutNoIncumbent;
        result.reports[i].diagnostics = err.what();
      }
      gate.release();
    });
  }
  for (std::thread& w : workers) w.join();

  for (std::size_t i = 0; i < lanes.size(); ++i) {
    const SolveReport& report = result.reports[i];
    if (report.schedule && report.objective < result.j_star) {
      result.j_star = report.objective;
      result.best_index = static_cast<int>(i);
    }
  }
  if (result.best_index < 0) {
    std::string detail;
    for (std::size_t i = 0; i < lanes.size(); ++i) {
      detail += "\n  lane " + std::to_string(i) +
                (lanes[i].label.empty() ? "" : " (" + lanes[i].label + ")") +
                ": " +
                (failures[i].empty() ? to_string(result.reports[i].status)
                                     : failures[i]);
    }
    throw SolverError("all race lanes failed:" + detail);
  }
  return result;
}

}  // namespace hsched

#endif  // HSCHED_RACE_HPP_
