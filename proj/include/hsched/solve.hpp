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

#ifndef HSCHED_SOLVE_HPP_
#define HSCHED_SOLVE_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hsched/ilp.hpp"
#include "hsched/warmstart_types.hpp"

namespace hsched {

enum class SolveStatus { kOptimal, kFeasible, kInfeasible, kTimeoutNoIncumbent };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kFeasible: return "feasible";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kTimeoutNoIncumbent: return "timeout_no_incumbent";
  }
  return "unknown";
}

struct SolverRequest {
  IlpModel model;
  std::optional<PartialSolution> warm_start;
  double time_budget_s = 60.0;
  std::uint64_t seed = 0;
};

/// Outcome of one solver lane. `objective` is always recomputed locally from
/// the schedule; `incumbent_trace` records (elapsed seconds, objective) at
/// every improvement and is nonincreasing in its second component.
struct SolveReport {
  double objective = std::numeric_limits<double>::infinity();
  double normalized_pct = std::numeric_limits<double>::infinity();
  double best_bound = 0.0;
  double gap = std::numeric_limits<double>::infinity();
  SolveStatus status = SolveStatus::kTimeoutNoIncumbent;
  std::vector<std::pair<double, double>> incumbent_trace;
  std::optional<Schedule> schedule;
  double runtime_s = 0.0;
  std::string diagnostics;
};

}  // namespace hsched

#endif  // HSCHED_SOLVE_HPP_
