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

// hsched: two-stage DAG scheduling driver.
//
//   gen     synthesize a random workload graph
//   diff    stage 1, gradient-based sampling with confidence tracking
//   solve   stage 2, exact solving raced over warm-start hints
//   hybrid  both stages end to end
//   bench   sweep instances, emit table- and figure-shaped data
//
// Exit codes: 0 success, 1 usage/input error, 2 infeasible, 3 backend failure.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hsched/bnb.hpp"
#include "hsched/diffsched.hpp"
#include "hsched/external.hpp"
#include "hsched/graph_io.hpp"
#include "hsched/json_io.hpp"
#include "hsched/race.hpp"
#include "hsched/svg.hpp"
#include "hsched/warmstart.hpp"
#include "hsched/workload.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitBackend = 3;

void write_text(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw hsched::ParseError("cannot write " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw hsched::ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---------------------------------------------------------------------------
// Shared option bundles
// ---------------------------------------------------------------------------

struct Stage1Opts {
  int latency = 10;
  double lambda = 10.0;
  double alpha = 1.0;
  double learning_rate = 0.05;
  double tau = 1.0;
  double tau_end = 0.0;
  int iterations = 30;
  std::uint64_t seed = 0;
  std::string entropy_sign = "balance";
  double fixed_tau_c = -1.0;  // >= 0 selects fixed-threshold mode
  double percentile = 70.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--latency,-L", latency, "Stage count bound L")
        ->capture_default_str();
    cmd->add_option("--lambda", lambda, "Entropy/communication trade-off")
        ->capture_default_str();
    cmd->add_option("--alpha", alpha, "Peak/communication weight in the exact objective")
        ->capture_default_str();
    cmd->add_option("--lr", learning_rate, "Gradient step size")
        ->capture_default_str();
    cmd->add_option("--tau", tau, "Gumbel-Softmax temperature")
        ->capture_default_str();
    cmd->add_option("--tau-end", tau_end,
                    "Linear temperature anneal target (0 disables)")
        ->capture_default_str();
    cmd->add_option("--iters,-t", iterations, "Stage-1 iterations / warm-start count")
        ->capture_default_str();
    cmd->add_option("--seed", seed, "Stage-1 RNG seed")->capture_default_str();
    cmd->add_option("--entropy-sign", entropy_sign,
                    "balance (spread load) or paper_literal")
        ->check(CLI::IsMember({"balance", "paper_literal"}))
        ->capture_default_str();
    cmd->add_option("--tau-c", fixed_tau_c,
                    "Fixed confidence threshold in [0,1]; overrides --percentile");
    cmd->add_option("--percentile", percentile,
                    "Pooled-confidence percentile for the automatic threshold")
        ->capture_default_str();
  }

  hsched::DiffConfig diff_config() const {
    hsched::DiffConfig cfg;
    cfg.lambda = lambda;
    cfg.temperature = tau;
    cfg.temperature_end = tau_end;
    cfg.learning_rate = learning_rate;
    cfg.iterations = iterations;
    cfg.seed = seed;
    cfg.entropy_sign = entropy_sign == "balance"
                           ? hsched::EntropySign::kBalance
                           : hsched::EntropySign::kPaperLiteral;
    return cfg;
  }

  hsched::ThresholdPolicy policy() const {
    return fixed_tau_c >= 0 ? hsched::ThresholdPolicy::fixed(fixed_tau_c)
                            : hsched::ThresholdPolicy::percentile(percentile);
  }
};

struct BackendOpts {
  std::string backend = "internal";
  std::string external_cmd;
  bool keep_artifacts = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--backend", backend, "internal or external")
        ->check(CLI::IsMember({"internal", "external"}))
        ->capture_default_str();
    cmd->add_option("--external-cmd", external_cmd,
                    "Command template with {model} {start} {timelimit} {solution}")
        ->envname("HSCHED_EXTERNAL_CMD");
    cmd->add_flag("--keep-artifacts", keep_artifacts,
                  "Retain solver temp files (external backend)");
  }

  std::optional<hsched::ExternalBackend> external() const {
    if (backend != "external") return std::nullopt;
    if (external_cmd.empty()) {
      throw hsched::SolverError(
          "external backend selected but no --external-cmd / "
          "HSCHED_EXTERNAL_CMD template given");
    }
    hsched::ExternalBackend b;
    b.command_template = external_cmd;
    b.keep_artifacts = keep_artifacts;
    return b;
  }
};

// ---------------------------------------------------------------------------
// Stage-1 artifacts
// ---------------------------------------------------------------------------

struct Stage1Result {
  std::vector<hsched::IterationRecord> records;
  double tau_c = 0.0;
  std::vector<hsched::PartialSolution> partials;  // one per record
  double seconds = 0.0;
};

Stage1Result run_stage1(const hsched::Dag& dag, const Stage1Opts& opts) {
  Stage1Result out;
  auto t0 = std::chrono::steady_clock::now();
  out.records = hsched::run_diffsched(dag, opts.latency, opts.diff_config());
  out.tau_c = hsched::resolve_threshold(opts.policy(), out.records);
  out.partials.reserve(out.records.size());
  for (const auto& rec : out.records) {
    out.partials.push_back(hsched::extract_partial(rec, out.tau_c));
  }
  out.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

/// Ranked warm portfolio: records are ordered by the exact objective of
/// their sampled schedules; the best contributes its full solution
/// (threshold 0) as lane 0, the next-best contribute their thresholded
/// partials. Mirrors the case-study spread of hint sizes.
std::vector<hsched::LaneSpec> warm_lanes(const Stage1Result& stage1,
                                         const hsched::Dag& dag, double alpha,
                                         int count) {
  std::vector<double> exact(stage1.records.size());
  for (std::size_t k = 0; k < stage1.records.size(); ++k) {
    exact[k] = hsched::evaluate_objective(stage1.records[k].schedule, dag, alpha)
                   .combined;
  }
  std::vector<std::size_t> order(stage1.records.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return exact[a] < exact[b];
  });
  std::vector<hsched::LaneSpec> lanes;
  for (std::size_t k = 0; k < order.size() && static_cast<int>(lanes.size()) < count;
       ++k) {
    const auto& rec = stage1.records[order[k]];
    hsched::LaneSpec lane;
    if (k == 0) {
      lane.hint = hsched::extract_partial(rec, 0.0);
      lane.label = "warm-full-iter" + std::to_string(rec.iteration);
    } else {
      lane.hint = stage1.partials[order[k]];
      lane.label = "warm-iter" + std::to_string(rec.iteration);
    }
    lanes.push_back(std::move(lane));
  }
  return lanes;
}

std::vector<hsched::LaneSpec> cold_lanes(int count, std::uint64_t seed_base) {
  std::vector<hsched::LaneSpec> lanes;
  for (int k = 0; k < count; ++k) {
    hsched::LaneSpec lane;
    lane.seed = seed_base + k;
    lane.label = "cold-seed" + std::to_string(lane.seed);
    lanes.push_back(std::move(lane));
  }
  return lanes;
}

std::vector<std::pair<double, double>> histogram(
    const std::vector<hsched::IterationRecord>& records, int bins,
    std::vector<long>* counts) {
  counts->assign(bins, 0);
  std::vector<std::pair<double, double>> edges;
  for (const auto& rec : records) {
    for (double c : rec.confidence) {
      int b = std::min(bins - 1, static_cast<int>(c * bins));
      ++(*counts)[b];
    }
  }
  for (int b = 0; b <= bins; ++b) {
    edges.push_back({static_cast<double>(b) / bins, 0});
  }
  return edges;
}

double mean_top_confidence(const hsched::IterationRecord& rec, double share) {
  std::vector<double> c = rec.confidence;
  std::sort(c.begin(), c.end(), std::greater<>());
  std::size_t keep = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                  c.size() * share));
  double sum = 0.0;
  for (std::size_t k = 0; k < keep; ++k) sum += c[k];
  return sum / keep;
}

void write_stage1_artifacts(const fs::path& dir, const hsched::Dag& dag,
                            const Stage1Opts& opts,
                            const Stage1Result& stage1) {
  fs::create_directories(dir / "partials");

  std::string records_text, trace, timing;
  trace = "iteration,loss_resource,loss_comm,loss_total\n";
  timing = "iteration,wall_seconds\n";
  for (const auto& rec : stage1.records) {
    records_text += json(rec).dump() + "\n";
    trace += std::to_string(rec.iteration) + "," +
             hsched::fmt_double(rec.loss_resource) + "," +
             hsched::fmt_double(rec.loss_comm) + "," +
             hsched::fmt_double(rec.loss_total) + "\n";
    timing += std::to_string(rec.iteration) + "," +
              hsched::fmt_double(rec.wall_seconds) + "\n";
  }
  write_text(dir / "records.jsonl", records_text);
  write_text(dir / "loss_trace.csv", trace);
  write_text(dir / "timing.csv", timing);

  const int bins = 50;
  std::vector<long> counts;
  auto edges = histogram(stage1.records, bins, &counts);
  std::string hist = "bin_lo,bin_hi,count\n";
  std::vector<double> edge_values;
  for (int b = 0; b < bins; ++b) {
    hist += hsched::fmt_double(edges[b].first) + "," +
            hsched::fmt_double(edges[b + 1].first) + "," +
            std::to_string(counts[b]) + "\n";
  }
  for (int b = 0; b <= bins; ++b) edge_values.push_back(edges[b].first);
  write_text(dir / "confidence_hist.csv", hist);
  write_text(dir / "confidence_hist.svg",
             hsched::svg_histogram("pooled confidence distribution",
                                   "confidence", edge_values, counts,
                                   stage1.tau_c));

  std::string iter_csv = "iteration,mean_top30_confidence\n";
  hsched::SvgSeries iter_series{"mean top-30% confidence", {}, true};
  for (const auto& rec : stage1.records) {
    double m = mean_top_confidence(rec, 0.30);
    iter_csv += std::to_string(rec.iteration) + "," + hsched::fmt_double(m) + "\n";
    iter_series.points.push_back({static_cast<double>(rec.iteration), m});
  }
  write_text(dir / "confidence_iter.csv", iter_csv);
  write_text(dir / "confidence_iter.svg",
             hsched::svg_chart("confidence across iterations", "iteration",
                               "mean top-30% confidence", {iter_series}));

  hsched::SvgSeries loss_series{"composite loss", {}, true};
  for (const auto& rec : stage1.records) {
    loss_series.points.push_back(
        {static_cast<double>(rec.iteration), rec.loss_total});
  }
  write_text(dir / "loss_trace.svg",
             hsched::svg_chart("stage-1 loss trace", "iteration",
                               "lambda*L_r + L_c", {loss_series}));

  json threshold{{"tau_c", stage1.tau_c},
                 {"mode", opts.fixed_tau_c >= 0 ? "fixed" : "percentile"},
                 {"percentile", opts.percentile}};
  write_text(dir / "threshold.json", threshold.dump(2) + "\n");

  double coverage_sum = 0.0;
  for (std::size_t k = 0; k < stage1.partials.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "iter_%03d.json",
                  stage1.records[k].iteration);
    write_text(dir / "partials" / name, json(stage1.partials[k]).dump(2) + "\n");
    coverage_sum += stage1.partials[k].coverage();
  }
  double coverage = coverage_sum / stage1.partials.size();
  if (coverage < 0.05 || coverage > 0.15) {
    std::cerr << "warning: mean hint coverage " << coverage * 100
              << "% sits outside the 5-15% band; consider tuning the "
                 "threshold\n";
  }

  // Replayable graph copy.
  write_text(dir / "graph.json", hsched::write_graph_json(dag));
}

json race_report_json(const hsched::RaceResult& result,
                      const std::vector<hsched::LaneSpec>& lanes) {
  json out;
  out["j_star"] = result.j_star;
  out["best_lane"] = result.best_index;
  out["normalized_pct"] = hsched::finite_or_null(result.best().normalized_pct);
  out["gap"] = hsched::finite_or_null(result.best().gap);
  auto arr = json::array();
  for (std::size_t k = 0; k < result.reports.size(); ++k) {
    json lane = result.reports[k];
    lane["label"] = lanes[k].label;
    lane["warm"] = lanes[k].hint.has_value();
    arr.push_back(std::move(lane));
  }
  out["lanes"] = std::move(arr);
  return out;
}

hsched::Dag load_or_generate(const std::string& graph_path, int nodes,
                             double prob, const std::string& weights,
                             std::uint64_t gen_seed) {
  if (!graph_path.empty()) return hsched::load_graph_file(graph_path);
  if (nodes <= 0) {
    throw hsched::ParseError("provide --graph FILE or --nodes N");
  }
  return hsched::generate_random_workload(
      nodes, prob, hsched::WeightDist::parse(weights), gen_seed);
}

void write_resolved_config(const CLI::App& app, const fs::path& dir) {
  write_text(dir / "config.resolved", app.config_to_str(true, true));
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_gen(int nodes, double prob, const std::string& weights,
            std::uint64_t seed, const std::string& out,
            std::string format_name) {
  hsched::Dag dag = hsched::generate_random_workload(
      nodes, prob, hsched::WeightDist::parse(weights), seed);
  hsched::GraphFormat format = hsched::GraphFormat::kJson;
  if (!format_name.empty()) {
    format = hsched::graph_format_from_name(format_name);
  } else {
    auto dot = out.rfind('.');
    std::string ext = dot == std::string::npos ? "json" : out.substr(dot + 1);
    if (ext == "dot" || ext == "gv") format = hsched::GraphFormat::kDot;
    else if (ext != "json") format = hsched::GraphFormat::kEdgeList;
  }
  write_text(out, hsched::write_graph(dag, format));
  std::cout << out << "  nodes=" << dag.node_count()
            << " edges=" << dag.edges().size() << "\n";
  return kExitOk;
}

int cmd_diff(const CLI::App& app, const std::string& graph_path,
             const Stage1Opts& opts, const std::string& outdir) {
  hsched::Dag dag = hsched::load_graph_file(graph_path);
  Stage1Result stage1 = run_stage1(dag, opts);
  fs::path dir(outdir);
  write_stage1_artifacts(dir, dag, opts, stage1);
  write_resolved_config(app, dir);

  const auto& last = stage1.records.back();
  auto breakdown =
      hsched::evaluate_objective(last.schedule, dag, opts.alpha);
  json summary{{"iterations", static_cast<int>(stage1.records.size())},
               {"tau_c", stage1.tau_c},
               {"final_loss", last.loss_total},
               {"final_objective", breakdown.combined},
               {"final_normalized_pct", breakdown.normalized_pct},
               {"stage1_seconds", stage1.seconds},
               {"t_iter_seconds", stage1.seconds / stage1.records.size()},
               {"outdir", dir.string()}};
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

int cmd_solve(const CLI::App& app, const std::string& graph_path,
              int latency, double alpha, const std::string& partials_dir,
              double budget, int threads, int cold, std::uint64_t seed_base,
              const BackendOpts& backend_opts, const std::string& out) {
  hsched::Dag dag = hsched::load_graph_file(graph_path);
  hsched::IlpModel model = hsched::build_ilp(dag, latency, alpha);

  std::vector<hsched::LaneSpec> lanes;
  if (!partials_dir.empty() && fs::exists(partials_dir)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(partials_dir)) {
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      hsched::PartialSolution partial =
          json::parse(read_text(file)).get<hsched::PartialSolution>();
      lanes.push_back({partial, 0, file.filename().string()});
    }
  }
  if (lanes.empty()) {
    std::cerr << "warning: no warm-start partials found; racing cold lanes "
                 "only\n";
    if (cold == 0) cold = 1;
  }
  auto colds = cold_lanes(cold, seed_base);
  lanes.insert(lanes.end(), colds.begin(), colds.end());

  auto external = backend_opts.external();
  if (threads <= 0) threads = static_cast<int>(lanes.size());
  hsched::RaceResult result = hsched::race(
      model, lanes, budget, threads, external ? &*external : nullptr);

  json report = race_report_json(result, lanes);
  if (!out.empty()) {
    write_text(out, report.dump(2) + "\n");
    fs::path dir = fs::path(out).parent_path();
    if (!dir.empty()) write_resolved_config(app, dir);
  }
  std::cout << report.dump(2) << "\n";
  return kExitOk;
}

struct HybridOpts {
  std::string graph_path;
  int nodes = 0;
  double prob = 0.1;
  std::string weights = "uniform:0.5,2.0";
  std::uint64_t gen_seed = 0;
  Stage1Opts stage1;
  double budget = 60.0;
  double cold_budget = 0.0;  // 0: 2x warm budget (collection-overhead parity)
  int warm = 5;
  int cold = 0;
  int threads = 0;
  std::uint64_t cold_seed_base = 1;
  BackendOpts backend;
  std::string outdir = "hybrid-run";
};

int cmd_hybrid(const CLI::App& app, const HybridOpts& opts) {
  hsched::Dag dag = load_or_generate(opts.graph_path, opts.nodes, opts.prob,
                                     opts.weights, opts.gen_seed);
  fs::path dir(opts.outdir);
  Stage1Result stage1 = run_stage1(dag, opts.stage1);
  write_stage1_artifacts(dir, dag, opts.stage1, stage1);
  write_resolved_config(app, dir);

  hsched::IlpModel model =
      hsched::build_ilp(dag, opts.stage1.latency, opts.stage1.alpha);
  auto lanes = warm_lanes(stage1, dag, opts.stage1.alpha, opts.warm);
  auto external = opts.backend.external();
  int threads = opts.threads > 0 ? opts.threads : static_cast<int>(lanes.size());

  auto t0 = std::chrono::steady_clock::now();
  hsched::RaceResult warm_result = hsched::race(
      model, lanes, opts.budget, threads, external ? &*external : nullptr);
  double warm_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  json report = json::object();
  report["stage1_seconds"] = stage1.seconds;
  report["t_iter_seconds"] = stage1.seconds / stage1.records.size();
  report["tau_c"] = stage1.tau_c;
  auto diff_breakdown = hsched::evaluate_objective(
      stage1.records.back().schedule, dag, opts.stage1.alpha);
  report["diffsched_converged_pct"] = diff_breakdown.normalized_pct;
  report["warm"] = race_report_json(warm_result, lanes);
  report["warm"]["race_seconds"] = warm_seconds;
  report["j_star"] = warm_result.j_star;
  report["normalized_pct"] =
      hsched::finite_or_null(warm_result.best().normalized_pct);
  report["gap"] = hsched::finite_or_null(warm_result.best().gap);

  if (opts.cold > 0) {
    double cold_budget =
        opts.cold_budget > 0 ? opts.cold_budget : 2.0 * opts.budget;
    auto colds = cold_lanes(opts.cold, opts.cold_seed_base);
    int cthreads =
        opts.threads > 0 ? opts.threads : static_cast<int>(colds.size());
    hsched::RaceResult cold_result = hsched::race(
        model, colds, cold_budget, cthreads, external ? &*external : nullptr);
    report["cold"] = race_report_json(cold_result, colds);
    report["cold"]["budget_s"] = cold_budget;
  }

  write_text(dir / "report.json", report.dump(2) + "\n");
  std::cout << report.dump(2) << "\n";
  return kExitOk;
}

struct BenchOpts {
  std::vector<std::string> instances;
  std::vector<int> sweep;
  double prob = 0.05;
  std::string weights = "uniform:0.5,2.0";
  std::uint64_t gen_seed = 0;
  Stage1Opts stage1;
  double budget = 60.0;
  double cold_budget = 0.0;
  int warm = 5;
  int cold = 5;
  int threads = 0;
  bool replay_iters = false;
  double replay_budget = 5.0;
  BackendOpts backend;
  std::string outdir = "bench-out";
};

int cmd_bench(const CLI::App& app, const BenchOpts& opts) {
  struct Row {
    std::string name;
    int nodes = 0;
    long edges = 0;
    long constraints = 0;
    double t_iter = 0.0;
    double diff_pct = 0.0;
    double cold_pct = 0.0;
    double warm_pct = 0.0;
    std::string warm_status, cold_status;
    std::string error;
  };
  std::vector<Row> rows;
  std::vector<hsched::IterationRecord> pooled_records;

  struct Job {
    std::string name;
    hsched::Dag dag;
  };
  std::vector<Job> jobs;
  for (const std::string& path : opts.instances) {
    jobs.push_back({fs::path(path).stem().string(),
                    hsched::load_graph_file(path)});
  }
  for (std::size_t k = 0; k < opts.sweep.size(); ++k) {
    int n = opts.sweep[k];
    jobs.push_back(
        {"rw" + std::to_string(n) + "_s" + std::to_string(opts.gen_seed + k),
         hsched::generate_random_workload(n, opts.prob,
                                          hsched::WeightDist::parse(opts.weights),
                                          opts.gen_seed + k)});
  }
  if (jobs.empty()) throw hsched::ParseError("bench needs --instances or --sweep");

  fs::path dir(opts.outdir);
  fs::create_directories(dir);
  auto external = opts.backend.external();
  double cold_budget =
      opts.cold_budget > 0 ? opts.cold_budget : 2.0 * opts.budget;

  for (const Job& job : jobs) {
    Row row;
    row.name = job.name;
    row.nodes = job.dag.node_count();
    row.edges = static_cast<long>(job.dag.edges().size());
    try {
      Stage1Result stage1 = run_stage1(job.dag, opts.stage1);
      row.t_iter = stage1.seconds / stage1.records.size();
      row.diff_pct = hsched::evaluate_objective(stage1.records.back().schedule,
                                                job.dag, opts.stage1.alpha)
                         .normalized_pct;
      hsched::IlpModel model =
          hsched::build_ilp(job.dag, opts.stage1.latency, opts.stage1.alpha);
      row.constraints = static_cast<long>(model.rows.size());

      auto warm = warm_lanes(stage1, job.dag, opts.stage1.alpha, opts.warm);
      int wthreads = opts.threads > 0 ? opts.threads
                                      : static_cast<int>(warm.size());
      hsched::RaceResult warm_result = hsched::race(
          model, warm, opts.budget, wthreads, external ? &*external : nullptr);
      row.warm_pct = warm_result.best().normalized_pct;
      row.warm_status = to_string(warm_result.best().status);

      auto colds = cold_lanes(opts.cold, 1);
      int cthreads = opts.threads > 0 ? opts.threads
                                      : static_cast<int>(colds.size());
      hsched::RaceResult cold_result =
          hsched::race(model, colds, cold_budget, cthreads,
                       external ? &*external : nullptr);
      row.cold_pct = cold_result.best().normalized_pct;
      row.cold_status = to_string(cold_result.best().status);

      for (const auto& rec : stage1.records) pooled_records.push_back(rec);

      if (opts.replay_iters) {
        // Objective reached from each single iteration's hint alone.
        std::string replay_csv = "iteration,objective_pct\n";
        hsched::SvgSeries series{"replayed warm-start", {}, true};
        for (std::size_t k = 0; k < stage1.records.size(); ++k) {
          std::vector<hsched::LaneSpec> lane{{stage1.partials[k], 0, ""}};
          hsched::RaceResult r = hsched::race(
              model, lane, opts.replay_budget, 1,
              external ? &*external : nullptr);
          replay_csv += std::to_string(stage1.records[k].iteration) + "," +
                        hsched::fmt_double(r.best().normalized_pct) + "\n";
          series.points.push_back(
              {static_cast<double>(stage1.records[k].iteration),
               r.best().normalized_pct});
        }
        write_text(dir / ("fig5_" + job.name + ".csv"), replay_csv);
        write_text(dir / ("fig5_" + job.name + ".svg"),
                   hsched::svg_chart("objective vs. hint iteration (" +
                                         job.name + ")",
                                     "iteration", "objective (% of heuristic)",
                                     {series}));
      }
    } catch (const std::exception& err) {
      row.error = err.what();
      std::cerr << "bench: " << job.name << " failed: " << err.what() << "\n";
    }
    rows.push_back(std::move(row));
  }

  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.constraints < b.constraints;
  });

  // Delta columns are derived at emission, never stored.
  std::string csv =
      "instance,nodes,edges,constraints,diff_conv_pct,cold_pct,warm_pct,"
      "delta1_pct,delta2_pct,warm_status,cold_status,error\n";
  std::string timing_csv = "instance,t_iter_seconds\n";
  hsched::SvgSeries s_cold{"cold-start", {}, true};
  hsched::SvgSeries s_warm{"warm-start", {}, true};
  hsched::SvgSeries s_diff{"stage-1 converged", {}, true};
  std::string fig4 = "index,instance,constraints,cold_pct,warm_pct,diff_pct\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Row& r = rows[k];
    if (r.error.empty()) {
      csv += r.name + "," + std::to_string(r.nodes) + "," +
             std::to_string(r.edges) + "," + std::to_string(r.constraints) +
             "," + hsched::fmt_double(r.diff_pct) + "," +
             hsched::fmt_double(r.cold_pct) + "," +
             hsched::fmt_double(r.warm_pct) + "," +
             hsched::fmt_double(r.warm_pct - r.diff_pct) + "," +
             hsched::fmt_double(r.warm_pct - r.cold_pct) + "," +
             r.warm_status + "," + r.cold_status + ",\n";
      fig4 += std::to_string(k) + "," + r.name + "," +
              std::to_string(r.constraints) + "," +
              hsched::fmt_double(r.cold_pct) + "," +
              hsched::fmt_double(r.warm_pct) + "," +
              hsched::fmt_double(r.diff_pct) + "\n";
      s_cold.points.push_back({static_cast<double>(k), r.cold_pct});
      s_warm.points.push_back({static_cast<double>(k), r.warm_pct});
      s_diff.points.push_back({static_cast<double>(k), r.diff_pct});
    } else {
      csv += r.name + "," + std::to_string(r.nodes) + "," +
             std::to_string(r.edges) + ",,,,,,,,," + "\"" + r.error + "\"\n";
    }
    timing_csv += r.name + "," + hsched::fmt_double(r.t_iter) + "\n";
  }
  write_text(dir / "bench.csv", csv);
  write_text(dir / "bench_timing.csv", timing_csv);
  write_text(dir / "fig4_objective_vs_instance.csv", fig4);
  write_text(dir / "fig4_objective_vs_instance.svg",
             hsched::svg_chart("objective by instance (sorted by constraints)",
                               "instance rank", "objective (% of heuristic)",
                               {s_cold, s_warm, s_diff}));

  if (!pooled_records.empty()) {
    const int bins = 50;
    std::vector<long> counts;
    auto edges = histogram(pooled_records, bins, &counts);
    std::string hist = "bin_lo,bin_hi,count\n";
    std::vector<double> edge_values;
    for (int b = 0; b < bins; ++b) {
      hist += hsched::fmt_double(edges[b].first) + "," +
              hsched::fmt_double(edges[b + 1].first) + "," +
              std::to_string(counts[b]) + "\n";
    }
    for (int b = 0; b <= bins; ++b) edge_values.push_back(edges[b].first);
    write_text(dir / "fig3_confidence_hist.csv", hist);
    write_text(dir / "fig3_confidence_hist.svg",
               hsched::svg_histogram("pooled confidence distribution",
                                     "confidence", edge_values, counts));
    int max_iter = 0;
    for (const auto& rec : pooled_records) {
      max_iter = std::max(max_iter, rec.iteration);
    }
    std::string iter_csv = "iteration,mean_top30_confidence\n";
    hsched::SvgSeries series{"mean top-30% confidence", {}, true};
    for (int it = 1; it <= max_iter; ++it) {
      double sum = 0.0;
      int n = 0;
      for (const auto& rec : pooled_records) {
        if (rec.iteration == it) {
          sum += mean_top_confidence(rec, 0.30);
          ++n;
        }
      }
      if (n == 0) continue;
      iter_csv += std::to_string(it) + "," + hsched::fmt_double(sum / n) + "\n";
      series.points.push_back({static_cast<double>(it), sum / n});
    }
    write_text(dir / "fig3_confidence_iter.csv", iter_csv);
    write_text(dir / "fig3_confidence_iter.svg",
               hsched::svg_chart("confidence across iterations", "iteration",
                                 "mean top-30% confidence", {series}));
  }

  write_resolved_config(app, dir);
  std::cout << (dir / "bench.csv").string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hsched: differentiable warm-starts racing exact DAG stage "
               "scheduling"};
  app.set_config("--config", "", "Read options from a key = value file");
  app.require_subcommand(1);

  // gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "Generate a random workload graph");
  int gen_nodes = 50;
  double gen_prob = 0.1;
  std::string gen_weights = "uniform:0.5,2.0";
  std::uint64_t gen_seed = 0;
  std::string gen_out = "workload.json";
  std::string gen_format;
  gen->add_option("--nodes,-n", gen_nodes, "Node count")->required();
  gen->add_option("--prob,-p", gen_prob, "Edge probability per (i<j) pair")
      ->capture_default_str();
  gen->add_option("--weights", gen_weights, "const:W or uniform:LO,HI")
      ->capture_default_str();
  gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
  gen->add_option("--out,-o", gen_out, "Output path")->capture_default_str();
  gen->add_option("--format", gen_format, "json, dot or edgelist");

  // diff ---------------------------------------------------------------
  auto* diff = app.add_subcommand("diff", "Run stage 1 and dump artifacts");
  std::string diff_graph, diff_outdir = "diff-run";
  Stage1Opts diff_opts;
  diff->add_option("--graph,-g", diff_graph, "Input graph file")->required();
  diff_opts.attach(diff);
  diff->add_option("--outdir,-o", diff_outdir, "Artifact directory")
      ->capture_default_str();

  // solve ----------------------------------------------------------------
  auto* solve = app.add_subcommand(
      "solve", "Race exact solvers over stored warm-start partials");
  std::string solve_graph, solve_partials, solve_out = "solve_report.json";
  int solve_latency = 10, solve_threads = 0, solve_cold = 0;
  double solve_alpha = 1.0, solve_budget = 60.0;
  std::uint64_t solve_seed_base = 1;
  BackendOpts solve_backend;
  solve->add_option("--graph,-g", solve_graph, "Input graph file")->required();
  solve->add_option("--latency,-L", solve_latency, "Stage count bound")
      ->capture_default_str();
  solve->add_option("--alpha", solve_alpha, "Objective weight")
      ->capture_default_str();
  solve->add_option("--partials", solve_partials,
                    "Directory of PartialSolution .json hints");
  solve->add_option("--budget", solve_budget, "Per-lane seconds")
      ->capture_default_str();
  solve->add_option("--threads", solve_threads,
                    "Concurrent lanes (0 = all at once)");
  solve->add_option("--cold", solve_cold, "Extra cold lanes")
      ->capture_default_str();
  solve->add_option("--seed-base", solve_seed_base, "First cold-lane seed")
      ->capture_default_str();
  solve_backend.attach(solve);
  solve->add_option("--out,-o", solve_out, "Report path")->capture_default_str();

  // hybrid ---------------------------------------------------------------
  auto* hybrid = app.add_subcommand(
      "hybrid", "Stage 1 + stage 2 end to end (optionally with a cold race)");
  HybridOpts hopts;
  hybrid->add_option("--graph,-g", hopts.graph_path, "Input graph file");
  hybrid->add_option("--nodes,-n", hopts.nodes,
                     "Generate a workload of this size instead");
  hybrid->add_option("--prob,-p", hopts.prob, "Generator edge probability")
      ->capture_default_str();
  hybrid->add_option("--weights", hopts.weights, "Generator weight distribution")
      ->capture_default_str();
  hybrid->add_option("--gen-seed", hopts.gen_seed, "Generator seed")
      ->capture_default_str();
  hopts.stage1.attach(hybrid);
  hybrid->add_option("--budget", hopts.budget, "Per-warm-lane seconds")
      ->capture_default_str();
  hybrid->add_option("--cold-budget", hopts.cold_budget,
                     "Per-cold-lane seconds (default: 2x warm budget)");
  hybrid->add_option("--warm-lanes", hopts.warm, "Warm lane count")
      ->capture_default_str();
  hybrid->add_option("--cold-lanes", hopts.cold,
                     "Cold comparison lanes (0 = skip)")
      ->capture_default_str();
  hybrid->add_option("--threads", hopts.threads,
                     "Concurrent lanes (0 = all at once)");
  hybrid->add_option("--cold-seed-base", hopts.cold_seed_base,
                     "First cold-lane seed")
      ->capture_default_str();
  hopts.backend.attach(hybrid);
  hybrid->add_option("--outdir,-o", hopts.outdir, "Artifact directory")
      ->capture_default_str();

  // bench ----------------------------------------------------------------
  auto* bench = app.add_subcommand(
      "bench", "Sweep instances; emit table- and figure-shaped CSV/SVG data");
  BenchOpts bopts;
  bench->add_option("--instances", bopts.instances, "Graph files to run");
  bench->add_option("--sweep", bopts.sweep,
                    "Generate random workloads of these node counts");
  bench->add_option("--prob,-p", bopts.prob, "Generator edge probability")
      ->capture_default_str();
  bench->add_option("--weights", bopts.weights, "Generator weight distribution")
      ->capture_default_str();
  bench->add_option("--gen-seed", bopts.gen_seed, "Generator seed base")
      ->capture_default_str();
  bopts.stage1.attach(bench);
  bench->add_option("--budget", bopts.budget, "Per-warm-lane seconds")
      ->capture_default_str();
  bench->add_option("--cold-budget", bopts.cold_budget,
                    "Per-cold-lane seconds (default: 2x warm budget)");
  bench->add_option("--warm-lanes", bopts.warm, "Warm lanes per instance")
      ->capture_default_str();
  bench->add_option("--cold-lanes", bopts.cold, "Cold lanes per instance")
      ->capture_default_str();
  bench->add_option("--threads", bopts.threads,
                    "Concurrent lanes (0 = all at once)");
  bench->add_flag("--replay-iters", bopts.replay_iters,
                  "Also race each iteration's hint alone (objective vs. "
                  "iteration order)");
  bench->add_option("--replay-budget", bopts.replay_budget,
                    "Per-replay-lane seconds")
      ->capture_default_str();
  bopts.backend.attach(bench);
  bench->add_option("--outdir,-o", bopts.outdir, "Output directory")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return cmd_gen(gen_nodes, gen_prob, gen_weights, gen_seed, gen_out,
                     gen_format);
    }
    if (diff->parsed()) return cmd_diff(app, diff_graph, diff_opts, diff_outdir);
    if (solve->parsed()) {
      return cmd_solve(app, solve_graph, solve_latency, solve_alpha,
                       solve_partials, solve_budget, solve_threads, solve_cold,
                       solve_seed_base, solve_backend, solve_out);
    }
    if (hybrid->parsed()) return cmd_hybrid(app, hopts);
    if (bench->parsed()) return cmd_bench(app, bopts);
  } catch (const hsched::InfeasibleError& err) {
    std::cerr << "infeasible: " << err.what() << "\n";
    return kExitInfeasible;
  } catch (const hsched::SolverError& err) {
    std::cerr << "solver failure: " << err.what() << "\n";
    return kExitBackend;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
