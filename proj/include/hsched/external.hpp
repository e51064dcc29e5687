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

#ifndef HSCHED_EXTERNAL_HPP_
#define HSCHED_EXTERNAL_HPP_

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hsched/lp_io.hpp"
#include "hsched/objective.hpp"
#include "hsched/solve.hpp"

namespace hsched {

/// Subprocess adapter for any MILP solver that can read MPS and write a
/// `<varname> <value>` solution file. The command template must contain
/// {model} and {solution}; {start} (warm-start file, possibly empty) and
/// {timelimit} (seconds) are optional.
struct ExternalBackend {
  std::string command_template;
  bool keep_artifacts = false;
  std::string workspace_root;  // defaults to the system temp directory
};

namespace detail {

inline void replace_all(std::string* text, const std::string& key,
                        const std::string& value) {
  std::size_t pos = 0;
  while ((pos = text->find(key, pos)) != std::string::npos) {
    text->replace(pos, key.size(), value);
    pos += value.size();
  }
}

inline std::string file_tail(const std::filesystem::path& path,
                             std::size_t max_bytes = 2000) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "";
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string s = buf.str();
  if (s.size() > max_bytes) s = "..." + s.substr(s.size() - max_bytes);
  return s;
}

struct Workspace {
  std::filesystem::path dir;
  bool keep = false;

  explicit Workspace(const ExternalBackend& backend) {
    static std::atomic<std::uint64_t> counter{0};
    std::filesystem::path root =
        backend.workspace_root.empty()
            ? std::filesystem::temp_directory_path()
            : std::filesystem::path(backend.workspace_root);
    auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    dir = root / ("hsched-" + std::to_string(::getpid()) + "-" +
                  std::to_string(counter.fetch_add(1)) + "-" +
                  std::to_string(mix_u64(static_cast<std::uint64_t>(stamp))));
    std::filesystem::create_directories(dir);
    keep = backend.keep_artifacts;
  }

  ~Workspace() {
    if (!keep) {
      std::error_code ec;
      std::filesystem::remove_all(dir, ec);
    }
  }
};

inline void write_file(const std::filesystem::path& path,
                       const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw SolverError("cannot write " + path.string());
}

}  // namespace detail

/// Runs the external command on a temp workspace, then re-reads, verifies
/// and re-prices the solution locally. The solver's own objective and bound
/// claims are never trusted; an externally produced schedule that fails the
/// difference constraints is an error, not a result.
inline SolveReport solve_external(const SolverRequest& request,
                                  const ExternalBackend& backend) {
  if (backend.command_template.find("{model}") == std::string::npos ||
      backend.command_template.find("{solution}") == std::string::npos) {
    throw SolverError(
        "external command template needs {model} and {solution} placeholders");
  }
  if (request.time_budget_s <= 0) {
    throw std::invalid_argument("time budget must be positive");
  }
  const IlpModel& m = request.model;
  detail::Workspace ws(backend);
  auto model_path = ws.dir / "model.mps";
  auto start_path = ws.dir / "start.sol";
  auto solution_path = ws.dir / "solution.sol";
  auto log_path = ws.dir / "solver.log";

  detail::write_file(model_path, emit_mps(m));
  std::string start_text;
  if (request.warm_start && !request.warm_start->empty()) {
    start_text = emit_mip_start(*request.warm_start, m);
  }
  detail::write_file(start_path, start_text);

  std::string cmd = backend.command_template;
  detail::replace_all(&cmd, "{model}", model_path.string());
  detail::replace_all(&cmd, "{start}", start_path.string());
  detail::replace_all(&cmd, "{solution}", solution_path.string());
  detail::replace_all(&cmd, "{timelimit}", fmt_double(request.time_budget_s));
  // Subshell so templates with their own redirections stay intact.
  cmd = "( " + cmd + " ) > " + log_path.string() + " 2>&1";

  auto t0 = std::chrono::steady_clock::now();
  int rc = std::system(cmd.c_str());
  double runtime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (rc != 0) {
    ws.keep = backend.keep_artifacts;
    throw SolverError("external solver exited with status " +
                      std::to_string(rc) + "; log tail:\n" +
                      detail::file_tail(log_path));
  }

  std::ifstream sol(solution_path, std::ios::binary);
  if (!sol) {
    throw SolverError("external solver wrote no solution file; log tail:\n" +
                      detail::file_tail(log_path));
  }
  std::ostringstream buf;
  buf << sol.rdbuf();

  Schedule schedule;
  try {
    auto values = parse_solution_values(buf.str(), m);
    schedule = schedule_from_assignment(m, values);
  } catch (const ParseError& err) {
    throw SolverError(std::string("unparseable external solution: ") +
                      err.what());
  }
  if (!feasible(schedule, build_sdc(m.dag, m.latency))) {
    throw SolverError("external solution failed verification: schedule "
                      "violates the difference constraints");
  }

  ObjectiveBreakdown breakdown = evaluate_objective(schedule, m.dag, m.alpha);
  SolveReport report;
  report.objective = breakdown.combined;
  report.normalized_pct = breakdown.normalized_pct;
  report.status = SolveStatus::kFeasible;
  report.best_bound = 0.0;  // external bounds are not parsed
  report.gap = breakdown.combined > 0 ? 1.0 : 0.0;
  report.schedule = schedule;
  report.runtime_s = runtime;
  report.incumbent_trace = {{runtime, breakdown.combined}};
  if (backend.keep_artifacts) {
    report.diagnostics = "artifacts kept under " + ws.dir.string();
  }
  return report;
}

}  // namespace hsched

#endif  // HSCHED_EXTERNAL_HPP_
