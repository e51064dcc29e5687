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

#ifndef HSCHED_JSON_IO_HPP_
#define HSCHED_JSON_IO_HPP_

#include <cmath>
#include <string>

#include <json.hpp>

#include "hsched/diffsched.hpp"
#include "hsched/solve.hpp"
#include "hsched/warmstart_types.hpp"

namespace hsched {

inline nlohmann::json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

inline void to_json(nlohmann::json& j, const PartialSolution& p) {
  j = nlohmann::json{{"source_iteration", p.source_iteration},
                     {"node_count", p.node_count},
                     {"coverage", p.coverage()}};
  auto assignments = nlohmann::json::array();
  for (const auto& [node, stage] : p.assignments) {
    nlohmann::json entry{{"node", node}, {"stage", stage}};
    auto it = p.confidences.find(node);
    if (it != p.confidences.end()) entry["confidence"] = it->second;
    assignments.push_back(std::move(entry));
  }
  j["assignments"] = std::move(assignments);
}

inline void from_json(const nlohmann::json& j, PartialSolution& p) {
  p = PartialSolution{};
  p.source_iteration = j.value("source_iteration", -1);
  p.node_count = j.at("node_count").get<int>();
  for (const auto& entry : j.at("assignments")) {
    int node = entry.at("node").get<int>();
    p.assignments[node] = entry.at("stage").get<int>();
    if (entry.contains("confidence")) {
      p.confidences[node] = entry.at("confidence").get<double>();
    }
  }
}

/// Record serialization keeps the replay-relevant fields (schedule,
/// confidences, losses); the dense soft/noise matrices stay in memory only.
inline void to_json(nlohmann::json& j, const IterationRecord& rec) {
  j = nlohmann::json{{"iteration", rec.iteration},
                     {"latency", rec.latency},
                     {"tau", rec.tau},
                     {"schedule", rec.schedule.stages},
                     {"confidence", rec.confidence},
                     {"confidence_stage", rec.confidence_stage},
                     {"loss_resource", rec.loss_resource},
                     {"loss_comm", rec.loss_comm},
                     {"loss_total", rec.loss_total},
                     {"wall_seconds", rec.wall_seconds}};
}

inline void from_json(const nlohmann::json& j, IterationRecord& rec) {
  rec = IterationRecord{};
  rec.iteration = j.at("iteration").get<int>();
  rec.latency = j.at("latency").get<int>();
  rec.tau = j.value("tau", 1.0);
  rec.schedule = Schedule{rec.latency, j.at("schedule").get<std::vector<int>>()};
  rec.confidence = j.at("confidence").get<std::vector<double>>();
  rec.confidence_stage = j.at("confidence_stage").get<std::vector<int>>();
  rec.loss_resource = j.at("loss_resource").get<double>();
  rec.loss_comm = j.at("loss_comm").get<double>();
  rec.loss_total = j.at("loss_total").get<double>();
  rec.wall_seconds = j.value("wall_seconds", 0.0);
}

inline void to_json(nlohmann::json& j, const SolveReport& report) {
  j = nlohmann::json{{"objective", finite_or_null(report.objective)},
                     {"normalized_pct", finite_or_null(report.normalized_pct)},
                     {"best_bound", finite_or_null(report.best_bound)},
                     {"gap", finite_or_null(report.gap)},
                     {"status", to_string(report.status)},
                     {"runtime_s", report.runtime_s}};
  if (report.schedule) j["schedule"] = report.schedule->stages;
  auto trace = nlohmann::json::array();
  for (auto [t, objective] : report.incumbent_trace) {
    trace.push_back({t, objective});
  }
  j["incumbent_trace"] = std::move(trace);
  if (!report.diagnostics.empty()) j["diagnostics"] = report.diagnostics;
}

}  // namespace hsched

#endif  // HSCHED_JSON_IO_HPP_
