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

#ifndef HSCHED_LP_IO_HPP_
#define HSCHED_LP_IO_HPP_

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hsched/ilp.hpp"
#include "hsched/warmstart_types.hpp"

namespace hsched {

// ---------------------------------------------------------------------------
// Solver-independent matrix view, used for round-trip checks and by the
// external-solver driver path.
// ---------------------------------------------------------------------------

struct RawVar {
  std::string name;
  VarKind kind = VarKind::kContinuous;
  double lb = 0.0;
  double ub = 0.0;
  double obj = 0.0;
};

struct RawRow {
  std::string name;
  RowSense sense = RowSense::kLe;
  double rhs = 0.0;
  std::vector<std::pair<std::string, double>> terms;
};

struct RawLinearModel {
  std::vector<RawVar> vars;
  std::vector<RawRow> rows;
};

inline RawLinearModel raw_view(const IlpModel& m) {
  RawLinearModel raw;
  raw.vars.reserve(m.vars.size());
  for (const IlpVar& v : m.vars) {
    raw.vars.push_back(RawVar{v.name, v.kind, v.lb, v.ub, v.obj});
  }
  raw.rows.reserve(m.rows.size());
  for (const IlpRow& r : m.rows) {
    RawRow row{r.name, r.sense, r.rhs, {}};
    row.terms.reserve(r.terms.size());
    for (auto [var, coeff] : r.terms) {
      row.terms.push_back({m.vars[var].name, coeff});
    }
    raw.rows.push_back(std::move(row));
  }
  return raw;
}

/// Same variables (kind, bounds, objective) and same constraint matrix
/// (sense, rhs, nonzero pattern and coefficients), regardless of ordering.
inline bool matrix_identical(const RawLinearModel& a, const RawLinearModel& b,
                             double tol = 0.0) {
  auto close = [tol](double x, double y) { return std::abs(x - y) <= tol; };
  if (a.vars.size() != b.vars.size() || a.rows.size() != b.rows.size()) {
    return false;
  }
  std::map<std::string, const RawVar*> vb;
  for (const RawVar& v : b.vars) vb[v.name] = &v;
  for (const RawVar& v : a.vars) {
    auto it = vb.find(v.name);
    if (it == vb.end()) return false;
    const RawVar& w = *it->second;
    if (v.kind != w.kind || !close(v.lb, w.lb) || !close(v.ub, w.ub) ||
        !close(v.obj, w.obj)) {
      return false;
    }
  }
  std::map<std::string, const RawRow*> rb;
  for (const RawRow& r : b.rows) rb[r.name] = &r;
  for (const RawRow& r : a.rows) {
    auto it = rb.find(r.name);
    if (it == rb.end()) return false;
    const RawRow& s = *it->second;
    if (r.sense != s.sense || !close(r.rhs, s.rhs)) return false;
    std::map<std::string, double> ta, tb;
    for (auto& [n, c] : r.terms) ta[n] += c;
    for (auto& [n, c] : s.terms) tb[n] += c;
    if (ta.size() != tb.size()) return false;
    for (auto& [n, c] : ta) {
      auto jt = tb.find(n);
      if (jt == tb.end() || !close(c, jt->second)) return false;
    }
  }
  return true;
}

namespace detail {

inline void check_unique_names(const IlpModel& m) {
  std::set<std::string> names;
  for (const IlpVar& v : m.vars) {
    if (!names.insert(v.name).second) {
      throw SolverError("variable name collision: " + v.name);
    }
  }
  names.clear();
  for (const IlpRow& r : m.rows) {
    if (!names.insert(r.name).second) {
      throw SolverError("row name collision: " + r.name);
    }
  }
}

inline const char* sense_tag(RowSense s) {
  switch (s) {
    case RowSense::kLe: return "L";
    case RowSense::kGe: return "G";
    case RowSense::kEq: return "E";
  }
  return "L";
}

inline const char* sense_op(RowSense s) {
  switch (s) {
    case RowSense::kLe: return "<=";
    case RowSense::kGe: return ">=";
    case RowSense::kEq: return "=";
  }
  return "<=";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// LP writer (CPLEX-style). Meant for human inspection and golden tests.
// ---------------------------------------------------------------------------

inline std::string emit_lp(const IlpModel& m) {
  detail::check_unique_names(m);
  std::string out = "\\ hsched time-indexed scheduling model\n";

  auto append_terms = [&out](const std::vector<std::pair<int, double>>& terms,
                             const IlpModel& model) {
    std::string line;
    bool first = true;
    for (auto [var, coeff] : terms) {
      if (coeff == 0.0) continue;
      std::string mag = std::abs(coeff) == 1.0
                            ? model.vars[var].name
                            : fmt_double(std::abs(coeff)) + " " +
                                  model.vars[var].name;
      std::string piece;
      if (first) {
        piece = (coeff < 0 ? "- " : "") + mag;
        first = false;
      } else {
        piece = (coeff < 0 ? " - " : " + ") + mag;
      }
      if (!line.empty() && line.size() + piece.size() > 72) {
        out += line + "\n     ";
        line.clear();
      }
      line += piece;
    }
    out += line;
  };

  out += "Minimize\n obj: ";
  std::vector<std::pair<int, double>> objective;
  for (std::size_t i = 0; i < m.vars.size(); ++i) {
    if (m.vars[i].obj != 0.0) {
      objective.push_back({static_cast<int>(i), m.vars[i].obj});
    }
  }
  append_terms(objective, m);
  out += "\nSubject To\n";
  for (const IlpRow& row : m.rows) {
    out += " " + row.name + ": ";
    append_terms(row.terms, m);
    out += std::string(" ") + detail::sense_op(row.sense) + " " +
           fmt_double(row.rhs) + "\n";
  }
  out += "Bounds\n";
  for (const IlpVar& v : m.vars) {
    if (v.kind == VarKind::kBinary) {
      if (v.ub == 0.0) out += " " + v.name + " = 0\n";
      continue;  // free binaries are covered by the Binaries section
    }
    out += " " + fmt_double(v.lb) + " <= " + v.name + " <= " +
           fmt_double(v.ub) + "\n";
  }
  out += "Binaries\n";
  std::string line = " ";
  for (const IlpVar& v : m.vars) {
    if (v.kind != VarKind::kBinary) continue;
    if (line.size() + v.name.size() + 1 > 72) {
      out += line + "\n";
      line = " ";
    }
    line += (line.size() > 1 ? " " : "") + v.name;
  }
  if (line.size() > 1) out += line + "\n";
  out += "End\n";
  return out;
}

// ---------------------------------------------------------------------------
// MPS writer/reader. Output is fixed-form with column widths widened to fit
// the longest name; the reader is token-based (free form) and accepts both
// our output and generic files.
// ---------------------------------------------------------------------------

inline std::string emit_mps(const IlpModel& m) {
  detail::check_unique_names(m);
  std::size_t width = 8;
  for (const IlpVar& v : m.vars) width = std::max(width, v.name.size());
  for (const IlpRow& r : m.rows) width = std::max(width, r.name.size());
  width += 2;
  auto pad = [width](const std::string& s) {
    return s + std::string(s.size() < width ? width - s.size() : 1, ' ');
  };

  std::string out = "NAME          hsched\nROWS\n N  obj\n";
  for (const IlpRow& r : m.rows) {
    out += std::string(" ") + detail::sense_tag(r.sense) + "  " + r.name + "\n";
  }

  // Column-major entries, objective first.
  std::vector<std::vector<std::pair<std::string, double>>> cols(m.vars.size());
  for (std::size_t i = 0; i < m.vars.size(); ++i) {
    if (m.vars[i].obj != 0.0) cols[i].push_back({"obj", m.vars[i].obj});
  }
  for (const IlpRow& r : m.rows) {
    for (auto [var, coeff] : r.terms) {
      if (coeff != 0.0) cols[var].push_back({r.name, coeff});
    }
  }

  out += "COLUMNS\n";
  bool in_int = false;
  for (std::size_t i = 0; i < m.vars.size(); ++i) {
    bool want_int = m.vars[i].kind == VarKind::kBinary;
    if (want_int != in_int) {
      out += "    " + pad("MARKER") + pad("'MARKER'") +
             (want_int ? "'INTORG'" : "'INTEND'") + "\n";
      in_int = want_int;
    }
    for (std::size_t k = 0; k < cols[i].size(); k += 2) {
      std::string line = "    " + pad(m.vars[i].name);
      line += pad(cols[i][k].first) + fmt_double(cols[i][k].second);
      if (k + 1 < cols[i].size()) {
        line += std::string(line.size() < 4 + 3 * width
                                ? 4 + 3 * width - line.size()
                                : 1,
                            ' ');
        line += pad(cols[i][k + 1].first) + fmt_double(cols[i][k + 1].second);
      }
      out += line + "\n";
    }
  }
  if (in_int) {
    out += "    " + pad("MARKER") + pad("'MARKER'") + "'INTEND'\n";
  }

  out += "RHS\n";
  for (const IlpRow& r : m.rows) {
    if (r.rhs != 0.0) {
      out += "    " + pad("RHS") + pad(r.name) + fmt_double(r.rhs) + "\n";
    }
  }

  out += "BOUNDS\n";
  for (const IlpVar& v : m.vars) {
    if (v.kind == VarKind::kBinary) {
      if (v.ub == 0.0) {
        out += " FX " + pad("BND") + pad(v.name) + "0\n";
      } else {
        out += " BV " + pad("BND") + pad(v.name) + "\n";
      }
    } else {
      out += " LO " + pad("BND") + pad(v.name) + fmt_double(v.lb) + "\n";
      out += " UP " + pad("BND") + pad(v.name) + fmt_double(v.ub) + "\n";
    }
  }
  out += "ENDATA\n";
  return out;
}

inline RawLinearModel parse_mps(std::string_view text) {
  RawLinearModel raw;
  std::unordered_map<std::string, int> row_of, var_of;
  auto var_index = [&](const std::string& name, bool integer) {
    auto it = var_of.find(name);
    if (it != var_of.end()) return it->second;
    int idx = static_cast<int>(raw.vars.size());
    var_of.emplace(name, idx);
    RawVar v;
    v.name = name;
    v.kind = integer ? VarKind::kBinary : VarKind::kContinuous;
    v.lb = 0.0;
    v.ub = integer ? 1.0 : std::numeric_limits<double>::infinity();
    raw.vars.push_back(std::move(v));
    return idx;
  };
  auto to_double = [](const std::string& s, int lineno) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) {
      throw ParseError("mps:" + std::to_string(lineno) + ": bad number '" + s +
                       "'");
    }
    return v;
  };

  enum Section { kNone, kRows, kColumns, kRhs, kRanges, kBounds, kDone };
  Section section = kNone;
  bool integer_block = false;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && (line[0] == '*' || line[0] == '\r')) continue;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    std::string t;
    while (ls >> t) tok.push_back(t);
    if (tok.empty()) continue;
    if (!std::isspace(static_cast<unsigned char>(line[0]))) {
      const std::string& head = tok[0];
      if (head == "NAME") continue;
      if (head == "ROWS") { section = kRows; continue; }
      if (head == "COLUMNS") { section = kColumns; continue; }
      if (head == "RHS") { section = kRhs; continue; }
      if (head == "RANGES") { section = kRanges; continue; }
      if (head == "BOUNDS") { section = kBounds; continue; }
      if (head == "ENDATA") { section = kDone; break; }
      if (head == "OBJSENSE" || head == "OBJSENSE:") { section = kNone; continue; }
      throw ParseError("mps:" + std::to_string(lineno) + ": unknown section '" +
                       head + "'");
    }
    switch (section) {
      case kRows: {
        if (tok.size() != 2) {
          throw ParseError("mps:" + std::to_string(lineno) + ": bad ROWS line");
        }
        if (tok[0] == "N") break;  // objective row, tracked implicitly
        RawRow row;
        row.name = tok[1];
        if (tok[0] == "L") row.sense = RowSense::kLe;
        else if (tok[0] == "G") row.sense = RowSense::kGe;
        else if (tok[0] == "E") row.sense = RowSense::kEq;
        else {
          throw ParseError("mps:" + std::to_string(lineno) +
                           ": unknown row sense '" + tok[0] + "'");
        }
        row_of.emplace(row.name, static_cast<int>(raw.rows.size()));
        raw.rows.push_back(std::move(row));
        break;
      }
      case kColumns: {
        if (tok.size() >= 3 && tok[1] == "'MARKER'") {
          integer_block = tok[2] == "'INTORG'";
          break;
        }
        if (tok.size() != 3 && tok.size() != 5) {
          throw ParseError("mps:" + std::to_string(lineno) +
                           ": bad COLUMNS line");
        }
        int var = var_index(tok[0], integer_block);
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          double coeff = to_double(tok[k + 1], lineno);
          if (tok[k] == "obj") {
            raw.vars[var].obj = coeff;
          } else {
            auto it = row_of.find(tok[k]);
            if (it == row_of.end()) {
              throw ParseError("mps:" + std::to_string(lineno) +
                               ": unknown row '" + tok[k] + "'");
            }
            raw.rows[it->second].terms.push_back({tok[0], coeff});
          }
        }
        break;
      }
      case kRhs: {
        if (tok.size() != 3 && tok.size() != 5) {
          throw ParseError("mps:" + std::to_string(lineno) + ": bad RHS line");
        }
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          auto it = row_of.find(tok[k]);
          if (it == row_of.end()) {
            throw ParseError("mps:" + std::to_string(lineno) +
                             ": unknown row '" + tok[k] + "'");
          }
          raw.rows[it->second].rhs = to_double(tok[k + 1], lineno);
        }
        break;
      }
      case kBounds: {
        if (tok.size() < 3) {
          throw ParseError("mps:" + std::to_string(lineno) + ": bad BOUNDS line");
        }
        auto it = var_of.find(tok[2]);
        if (it == var_of.end()) {
          throw ParseError("mps:" + std::to_string(lineno) +
                           ": bound on unknown variable '" + tok[2] + "'");
        }
        RawVar& v = raw.vars[it->second];
        const std::string& kind = tok[0];
        double val = tok.size() > 3 ? to_double(tok[3], lineno) : 0.0;
        if (kind == "BV") {
          v.kind = VarKind::kBinary;
          v.lb = 0.0;
          v.ub = 1.0;
        } else if (kind == "FX") {
          v.lb = v.ub = val;
        } else if (kind == "LO") {
          v.lb = val;
        } else if (kind == "UP") {
          v.ub = val;
        } else if (kind == "MI") {
          v.lb = -std::numeric_limits<double>::infinity();
        } else if (kind == "PL") {
          v.ub = std::numeric_limits<double>::infinity();
        } else if (kind == "UI") {
          v.kind = VarKind::kBinary;
          v.ub = val;
        } else {
          throw ParseError("mps:" + std::to_string(lineno) +
                           ": unknown bound type '" + kind + "'");
        }
        break;
      }
      case kRanges:
        throw ParseError("mps:" + std::to_string(lineno) +
                         ": RANGES section not supported");
      default:
        throw ParseError("mps:" + std::to_string(lineno) +
                         ": data before any section header");
    }
  }
  if (section != kDone) throw ParseError("mps: missing ENDATA");
  return raw;
}

// ---------------------------------------------------------------------------
// Warm-start and solution files: one `<varname> <value>` per line.
// ---------------------------------------------------------------------------

/// One-hot expansion of every assigned node, restricted to the variables
/// that exist in the model. Assignments outside a node's stage window are
/// rejected: such a hint could never appear in a feasible solution.
inline std::string emit_mip_start(const PartialSolution& partial,
                                  const IlpModel& m) {
  std::string out;
  for (const auto& [node, stage] : partial.assignments) {
    if (node < 0 || node >= m.dag.node_count()) {
      throw SolverError("warm-start references unknown node " +
                        std::to_string(node));
    }
    if (stage < m.windows[node].earliest || stage > m.windows[node].latest) {
      throw SolverError("warm-start assigns node " + std::to_string(node) +
                        " to stage " + std::to_string(stage) +
                        " outside its window [" +
                        std::to_string(m.windows[node].earliest) + ", " +
                        std::to_string(m.windows[node].latest) + "]");
    }
    for (int a = 0; a < m.latency; ++a) {
      out += m.vars[m.x(node, a)].name + (a == stage ? " 1\n" : " 0\n");
    }
  }
  return out;
}

/// Parses solver output into a per-variable assignment. Lines starting with
/// '#' or '//' and blank lines are skipped; only the first two columns are
/// read. Unknown variable names are an error.
inline std::vector<double> parse_solution_values(std::string_view text,
                                                 const IlpModel& m) {
  auto table = m.name_table();
  std::vector<double> values(m.vars.size(), 0.0);
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string name, value;
    if (!(ls >> name)) continue;
    if (name[0] == '#' || name.rfind("//", 0) == 0) continue;
    if (!(ls >> value)) {
      throw ParseError("solution:" + std::to_string(lineno) +
                       ": missing value after '" + name + "'");
    }
    auto it = table.find(name);
    if (it == table.end()) {
      throw ParseError("solution:" + std::to_string(lineno) +
                       ": unknown variable '" + name + "'");
    }
    char* end = nullptr;
    double v = std::strtod(value.c_str(), &end);
    if (end != value.c_str() + value.size()) {
      throw ParseError("solution:" + std::to_string(lineno) +
                       ": bad value '" + value + "'");
    }
    values[it->second] = v;
  }
  return values;
}

/// Reads the x block of a parsed assignment back into a Schedule. Every node
/// must have exactly one stage with value > 0.5.
inline Schedule schedule_from_assignment(const IlpModel& m,
                                         const std::vector<double>& values) {
  Schedule s{m.latency, std::vector<int>(m.dag.node_count(), -1)};
  for (int v = 0; v < m.dag.node_count(); ++v) {
    for (int a = 0; a < m.latency; ++a) {
      if (values[m.x(v, a)] > 0.5) {
        if (s.stages[v] != -1) {
          throw ParseError("solution assigns node " + std::to_string(v) +
                           " to multiple stages");
        }
        s.stages[v] = a;
      }
    }
    if (s.stages[v] == -1) {
      throw ParseError("solution leaves node " + std::to_string(v) +
                       " unassigned");
    }
  }
  return s;
}

}  // namespace hsched

#endif  // HSCHED_LP_IO_HPP_
