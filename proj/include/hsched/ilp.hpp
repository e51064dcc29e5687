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

#ifndef HSCHED_ILP_HPP_
#define HSCHED_ILP_HPP_

#include <cmath>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hsched/graph.hpp"
#include "hsched/objective.hpp"
#include "hsched/sdc.hpp"

namespace hsched {

enum class VarKind { kBinary, kContinuous };

struct IlpVar {
  std::string name;
  VarKind kind = VarKind::kBinary;
  double lb = 0.0;
  double ub = 1.0;
  double obj = 0.0;
};

enum class RowSense { kLe, kGe, kEq };

struct IlpRow {
  std::string name;
  RowSense sense = RowSense::kLe;
  double rhs = 0.0;
  std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)
};

/// Time-indexed 0/1 model of one scheduling instance.
///
/// Variables: x_{v,a} (node v runs at stage a), z_{e,a} (edge e spans the
/// boundary between stages a and a+1), and one continuous peak variable M.
/// Rows: one assignment equality per node, one precedence row per edge
/// (stage expressed as sum(a * x_{v,a})), M >= stage load per stage, and the
/// crossing linearization z_{e,a} >= cum_src(a) - cum_dst(a) over cumulative
/// sums. x variables outside a node's stage window are kept as columns fixed
/// to zero. The objective matches evaluate_objective:
///   alpha * M / ceil(|V|/L) + sum(w_e * z_{e,a}) / sum(w).
struct IlpModel {
  Dag dag;
  int latency = 0;
  double alpha = 1.0;
  std::vector<StageWindow> windows;

  std::vector<IlpVar> vars;
  std::vector<IlpRow> rows;

  std::vector<int> x_index;  // node * latency + stage -> var index
  std::vector<int> z_index;  // edge * (latency-1) + boundary -> var index
  int peak_var = -1;

  int x(int node, int stage) const { return x_index[node * latency + stage]; }
  int z(int edge, int boundary) const {
    return z_index[edge * (latency - 1) + boundary];
  }

  /// Name -> variable index (built on demand by callers that need it).
  std::unordered_map<std::string, int> name_table() const {
    std::unordered_map<std::string, int> table;
    table.reserve(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i) {
      table.emplace(vars[i].name, static_cast<int>(i));
    }
    return table;
  }
};

inline IlpModel build_ilp(const Dag& dag, int latency, double alpha) {
  if (alpha < 0) throw std::invalid_argument("alpha must be nonnegative");
  IlpModel m{dag, latency, alpha, stage_windows(dag, latency), {}, {}, {}, {}, -1};
  const int n = dag.node_count();
  const int ecount = static_cast<int>(dag.edges().size());
  const double wsum = dag.total_edge_weight();
  const int floor = peak_floor(n, latency);

  m.x_index.assign(static_cast<std::size_t>(n) * latency, -1);
  for (int v = 0; v < n; ++v) {
    for (int a = 0; a < latency; ++a) {
      bool in_window = a >= m.windows[v].earliest && a <= m.windows[v].latest;
      IlpVar var;
      var.name = "x_" + std::to_string(v) + "_" + std::to_string(a);
      var.kind = VarKind::kBinary;
      var.lb = 0.0;
      var.ub = in_window ? 1.0 : 0.0;  // window presolve: fixed to zero
      m.x_index[v * latency + a] = static_cast<int>(m.vars.size());
      m.vars.push_back(std::move(var));
    }
  }
  m.z_index.assign(static_cast<std::size_t>(ecount) * (latency - 1), -1);
  for (int k = 0; k < ecount; ++k) {
    for (int a = 0; a + 1 < latency; ++a) {
      IlpVar var;
      var.name = "z_" + std::to_string(k) + "_" + std::to_string(a);
      var.kind = VarKind::kBinary;
      var.obj = wsum > 0 ? dag.edges()[k].weight / wsum : 0.0;
      m.z_index[k * (latency - 1) + a] = static_cast<int>(m.vars.size());
      m.vars.push_back(std::move(var));
    }
  }
  {
    IlpVar peak;
    peak.name = "M";
    peak.kind = VarKind::kContinuous;
    peak.lb = floor;  // pigeonhole bound
    peak.ub = n;
    peak.obj = alpha / floor;
    m.peak_var = static_cast<int>(m.vars.size());
    m.vars.push_back(std::move(peak));
  }

  for (int v = 0; v < n; ++v) {
    IlpRow row;
    row.name = "assign_" + std::to_string(v);
    row.sense = RowSense::kEq;
    row.rhs = 1.0;
    for (int a = 0; a < latency; ++a) row.terms.push_back({m.x(v, a), 1.0});
    m.rows.push_back(std::move(row));
  }
  for (int k = 0; k < ecount; ++k) {
    const Edge& e = dag.edges()[k];
    IlpRow row;
    row.name = "prec_" + std::to_string(k);
    row.sense = RowSense::kLe;
    row.rhs = e.diff_const;
    for (int a = 1; a < latency; ++a) {
      row.terms.push_back({m.x(e.src, a), static_cast<double>(a)});
    }
    for (int a = 1; a < latency; ++a) {
      row.terms.push_back({m.x(e.dst, a), static_cast<double>(-a)});
    }
    m.rows.push_back(std::move(row));
  }
  for (int a = 0; a < latency; ++a) {
    IlpRow row;
    row.name = "peak_" + std::to_string(a);
    row.sense = RowSense::kLe;
    row.rhs = 0.0;
    for (int v = 0; v < n; ++v) row.terms.push_back({m.x(v, a), 1.0});
    row.terms.push_back({m.peak_var, -1.0});
    m.rows.push_back(std::move(row));
  }
  for (int k = 0; k < ecount; ++k) {
    const Edge& e = dag.edges()[k];
    for (int a = 0; a + 1 < latency; ++a) {
      IlpRow row;
      row.name = "cross_" + std::to_string(k) + "_" + std::to_string(a);
      row.sense = RowSense::kLe;
      row.rhs = 0.0;
      for (int b = 0; b <= a; ++b) row.terms.push_back({m.x(e.src, b), 1.0});
      for (int b = 0; b <= a; ++b) row.terms.push_back({m.x(e.dst, b), -1.0});
      row.terms.push_back({m.z(k, a), -1.0});
      m.rows.push_back(std::move(row));
    }
  }
  return m;
}

/// One-hot expansion of a schedule into a full variable assignment
/// (x one-hot per node, z set to the actual boundary crossings, M to the
/// actual peak).
inline std::vector<double> expand_schedule(const IlpModel& m,
                                           const Schedule& schedule) {
  std::vector<double> assignment(m.vars.size(), 0.0);
  std::vector<int> load(m.latency, 0);
  for (int v = 0; v < m.dag.node_count(); ++v) {
    assignment[m.x(v, schedule.stages[v])] = 1.0;
    ++load[schedule.stages[v]];
  }
  for (std::size_t k = 0; k < m.dag.edges().size(); ++k) {
    const Edge& e = m.dag.edges()[k];
    for (int a = schedule.stages[e.src]; a < schedule.stages[e.dst]; ++a) {
      if (a + 1 < m.latency) assignment[m.z(static_cast<int>(k), a)] = 1.0;
    }
  }
  assignment[m.peak_var] = *std::max_element(load.begin(), load.end());
  return assignment;
}

inline double assignment_objective(const IlpModel& m,
                                   std::span<const double> assignment) {
  double total = 0.0;
  for (std::size_t i = 0; i < m.vars.size(); ++i) {
    total += m.vars[i].obj * assignment[i];
  }
  return total;
}

/// True when every row and every variable bound holds within `tol`.
inline bool assignment_satisfies(const IlpModel& m,
                                 std::span<const double> assignment,
                                 double tol = 1e-9) {
  for (std::size_t i = 0; i < m.vars.size(); ++i) {
    if (assignment[i] < m.vars[i].lb - tol ||
        assignment[i] > m.vars[i].ub + tol) {
      return false;
    }
  }
  for (const IlpRow& row : m.rows) {
    double lhs = 0.0;
    for (auto [var, coeff] : row.terms) lhs += coeff * assignment[var];
    switch (row.sense) {
      case RowSense::kLe:
        if (lhs > row.rhs + tol) return false;
        break;
      case RowSense::kGe:
        if (lhs < row.rhs - tol) return false;
        break;
      case RowSense::kEq:
        if (std::abs(lhs - row.rhs) > tol) return false;
        break;
    }
  }
  return true;
}

}  // namespace hsched

#endif  // HSCHED_ILP_HPP_
