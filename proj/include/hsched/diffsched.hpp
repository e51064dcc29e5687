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

#ifndef HSCHED_DIFFSCHED_HPP_
#define HSCHED_DIFFSCHED_HPP_

#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "hsched/common.hpp"
#include "hsched/graph.hpp"
#include "hsched/sdc.hpp"

namespace hsched {

/// Sign convention for the stage-occupancy entropy loss. kBalance minimizes
/// the negated entropy, which spreads nodes across stages and therefore
/// lowers the true peak; kPaperLiteral minimizes the entropy itself.
enum class EntropySign { kBalance, kPaperLiteral };

struct DiffConfig {
  double lambda = 10.0;          // resource/communication trade-off
  double temperature = 1.0;      // Gumbel-Softmax temperature
  double temperature_end = 0.0;  // > 0 enables a linear anneal to this value
  double learning_rate = 0.05;
  int iterations = 30;
  std::uint64_t seed = 0;
  EntropySign entropy_sign = EntropySign::kBalance;

  void validate() const {
    if (lambda < 0) throw std::invalid_argument("lambda must be >= 0");
    if (!(temperature > 0)) throw std::invalid_argument("temperature must be > 0");
    if (temperature_end < 0) {
      throw std::invalid_argument("temperature_end must be >= 0");
    }
    if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    if (!(learning_rate > 0)) {
      throw std::invalid_argument("learning rate must be > 0");
    }
  }
};

/// Suffix indicator of the stages a child may take once its parent has been
/// sampled: T[a] = 1 iff a >= parent_stage - c, realized as the cumulative
/// sum of the parent's one-hot shifted by |c| (rightward for c <= 0,
/// leftward with saturation at stage 0 for c > 0). All-zero output means the
/// parent's stage left the child no feasible stage.
inline std::vector<std::uint8_t> mask_leq_stage(int parent_stage, int c,
                                                int latency) {
  std::vector<std::uint8_t> mask(latency, 0);
  long cutoff = static_cast<long>(parent_stage) - c;
  if (cutoff >= latency) return mask;  // shifted out entirely
  for (int a = static_cast<int>(std::max(0L, cutoff)); a < latency; ++a) {
    mask[a] = 1;
  }
  return mask;
}

inline std::vector<std::uint8_t> mask_leq(
    const std::vector<std::uint8_t>& parent_onehot, int c) {
  int hot = -1;
  for (std::size_t a = 0; a < parent_onehot.size(); ++a) {
    if (parent_onehot[a] != 0) {
      if (parent_onehot[a] != 1 || hot != -1) {
        throw std::invalid_argument("mask_leq expects a one-hot vector");
      }
      hot = static_cast<int>(a);
    }
  }
  if (hot == -1) throw std::invalid_argument("mask_leq expects a one-hot vector");
  return mask_leq_stage(hot, c, static_cast<int>(parent_onehot.size()));
}

/// Everything one optimizer iteration produced. `soft` holds the noisy
/// renormalized sampling distributions y' (the differentiable path).
/// `probs` holds the noise-free constrained vectors P' used for confidence:
/// the window-masked softmax of the logits multiplied elementwise by the
/// sampled-predecessor mask, deliberately not renormalized, so
/// confidence[v] = max(P'_v) matches the mass actually left on the sampled
/// region.
struct IterationRecord {
  int iteration = 0;
  int latency = 0;
  double tau = 1.0;
  Schedule schedule;
  std::vector<double> soft;           // |V| x L, row-major
  std::vector<double> probs;          // |V| x L
  std::vector<double> noise;          // |V| x L Gumbel draws
  std::vector<std::uint8_t> mask;     // |V| x L combined sampling support
  std::vector<double> confidence;     // per node, max of probs row
  std::vector<int> confidence_stage;  // per node, argmax of probs row
  double loss_resource = 0.0;
  double loss_comm = 0.0;
  double loss_total = 0.0;
  double wall_seconds = 0.0;

  int node_count() const { return static_cast<int>(schedule.stages.size()); }
};

/// Entropy surrogate of the peak resource, computed from the soft stage
/// occupancy counts of a record. H lands in [0, log L]; the returned loss is
/// -H under kBalance and +H under kPaperLiteral.
inline double loss_resource(const IterationRecord& rec,
                            EntropySign sign = EntropySign::kBalance) {
  const int n = rec.node_count();
  const int latency = rec.latency;
  double entropy = 0.0;
  for (int a = 0; a < latency; ++a) {
    double occupancy = 0.0;
    for (int v = 0; v < n; ++v) occupancy += rec.soft[v * latency + a];
    double p = occupancy / n;
    if (p > 0) entropy -= p * std::log(p);
  }
  return sign == EntropySign::kBalance ? -entropy : entropy;
}

/// Expected weighted boundary crossings of the soft distributions,
/// normalized by the total edge weight. On one-hot rows this equals the
/// exact communication cost divided by sum(w).
inline double loss_comm(const IterationRecord& rec, const Dag& dag) {
  const double wsum = dag.total_edge_weight();
  if (wsum <= 0) return 0.0;
  const int latency = rec.latency;
  std::vector<double> cum(rec.soft.size());
  for (int v = 0; v < rec.node_count(); ++v) {
    double run = 0.0;
    for (int a = 0; a < latency; ++a) {
      run += rec.soft[v * latency + a];
      cum[v * latency + a] = run;
    }
  }
  double total = 0.0;
  for (const Edge& e : dag.edges()) {
    for (int a = 0; a + 1 < latency; ++a) {
      total += e.weight * cum[e.src * latency + a] *
               (1.0 - cum[e.dst * latency + a]);
    }
  }
  return total / wsum;
}

class DiffOptimizer {
 public:
  DiffOptimizer(const Dag& dag, int latency, DiffConfig config)
      : dag_(dag),
        latency_(latency),
        config_(config),
        rng_(config.seed),
        windows_(stage_windows(dag, latency)) {
    config_.validate();
    const std::size_t cells = static_cast<std::size_t>(dag_.node_count()) * latency_;
    logits_.assign(cells, 0.0);
    for (double& l : logits_) l += rng_.uniform(-1e-3, 1e-3);
    adam_m_.assign(cells, 0.0);
    adam_v_.assign(cells, 0.0);
    window_mask_.assign(cells, 0);
    for (int v = 0; v < dag_.node_count(); ++v) {
      for (int a = windows_[v].earliest; a <= windows_[v].latest; ++a) {
        window_mask_[v * latency_ + a] = 1;
      }
    }
  }

  const Dag& dag() const { return dag_; }
  int latency() const { return latency_; }
  const DiffConfig& config() const { return config_; }
  const std::vector<double>& logits() const { return logits_; }
  void set_logits(std::vector<double> logits) { logits_ = std::move(logits); }
  const std::vector<StageWindow>& windows() const { return windows_; }
  int steps_taken() const { return steps_; }

  /// Temperature used at step index `k` (0-based) under the configured
  /// anneal schedule.
  double tau_at(int k) const {
    if (config_.temperature_end <= 0 || config_.iterations <= 1) {
      return config_.temperature;
    }
    double f = static_cast<double>(k) / (config_.iterations - 1);
    return config_.temperature +
           f * (config_.temperature_end - config_.temperature);
  }

  struct SampleResult {
    int stage = 0;
    std::vector<double> soft;   // y' over the combined support
    std::vector<double> probs;  // P', noise-free confidence vector
  };

  /// Draws one node's stage with the constrained Gumbel trick.
  /// `parent_mask` is the elementwise product of mask_leq over the node's
  /// already-sampled predecessors (all ones for sources). The sampling
  /// support is parent_mask AND the node's stage window; masked entries are
  /// forced to zero and the survivors renormalized. The hard stage is the
  /// argmax of the noisy soft vector and always lies inside the support.
  SampleResult constrained_sample(int node,
                                  const std::vector<std::uint8_t>& parent_mask,
                                  double tau) {
    std::vector<double> noise(latency_);
    for (double& g : noise) g = rng_.gumbel();
    return sample_with_noise(logits_, node, parent_mask, noise, tau);
  }

  /// One full constrained sampling sweep in topological order. The sampled
  /// schedule is feasible by construction; losses are filled in from the
  /// soft path.
  IterationRecord forward_pass() {
    const int n = dag_.node_count();
    IterationRecord rec;
    rec.iteration = steps_ + 1;
    rec.latency = latency_;
    rec.tau = tau_at(steps_);
    rec.schedule = Schedule{latency_, std::vector<int>(n, 0)};
    rec.soft.assign(static_cast<std::size_t>(n) * latency_, 0.0);
    rec.probs.assign(static_cast<std::size_t>(n) * latency_, 0.0);
    rec.noise.assign(static_cast<std::size_t>(n) * latency_, 0.0);
    rec.mask.assign(static_cast<std::size_t>(n) * latency_, 0);
    rec.confidence.assign(n, 0.0);
    rec.confidence_stage.assign(n, 0);

    for (int v : dag_.topological_order()) {
      std::vector<std::uint8_t> parent_mask(latency_, 1);
      for (int k : dag_.in_edges(v)) {
        const Edge& e = dag_.edges()[k];
        long cutoff = static_cast<long>(rec.schedule.stages[e.src]) - e.diff_const;
        for (int a = 0; a < std::min<long>(cutoff, latency_); ++a) {
          parent_mask[a] = 0;
        }
        if (cutoff >= latency_) {
          std::fill(parent_mask.begin(), parent_mask.end(), 0);
        }
      }
      for (int a = 0; a < latency_; ++a) {
        rec.noise[v * latency_ + a] = rng_.gumbel();
      }
      std::vector<double> noise(rec.noise.begin() + v * latency_,
                                rec.noise.begin() + (v + 1) * latency_);
      SampleResult s = sample_with_noise(logits_, v, parent_mask, noise, rec.tau);
      rec.schedule.stages[v] = s.stage;
      for (int a = 0; a < latency_; ++a) {
        rec.soft[v * latency_ + a] = s.soft[a];
        rec.probs[v * latency_ + a] = s.probs[a];
        rec.mask[v * latency_ + a] =
            parent_mask[a] & window_mask_[v * latency_ + a];
      }
      int best = 0;
      for (int a = 1; a < latency_; ++a) {
        if (s.probs[a] > s.probs[best]) best = a;
      }
      rec.confidence[v] = s.probs[best];
      rec.confidence_stage[v] = best;
    }

    rec.loss_resource = hsched::loss_resource(rec, config_.entropy_sign);
    rec.loss_comm = hsched::loss_comm(rec, dag_);
    rec.loss_total = config_.lambda * rec.loss_resource + rec.loss_comm;
    return rec;
  }

  /// Losses of the composite objective re-evaluated at `logits` while the
  /// record's masks, noise and temperature stay fixed. This is the smooth
  /// function the analytic gradient differentiates; finite-difference checks
  /// probe it directly.
  std::pair<double, double> losses_with(const std::vector<double>& logits,
                                        const IterationRecord& rec) const {
    IterationRecord scratch;
    scratch.latency = latency_;
    scratch.schedule = rec.schedule;
    scratch.soft.assign(rec.soft.size(), 0.0);
    const int n = dag_.node_count();
    for (int v = 0; v < n; ++v) {
      std::vector<std::uint8_t> support(rec.mask.begin() + v * latency_,
                                        rec.mask.begin() + (v + 1) * latency_);
      std::vector<double> noise(rec.noise.begin() + v * latency_,
                                rec.noise.begin() + (v + 1) * latency_);
      std::vector<double> soft =
          masked_softmax(logits, v, support, &noise, rec.tau);
      for (int a = 0; a < latency_; ++a) scratch.soft[v * latency_ + a] = soft[a];
    }
    return {hsched::loss_resource(scratch, config_.entropy_sign),
            hsched::loss_comm(scratch, dag_)};
  }

  /// Analytic d(lambda * L_r + L_c)/d logits for one record, differentiating
  /// the soft path with the record's masks and noise held fixed (straight
  /// through the hard samples).
  std::vector<double> gradient(const IterationRecord& rec) const {
    const int n = dag_.node_count();
    const int latency = latency_;
    std::vector<double> dsoft(rec.soft.size(), 0.0);

    if (config_.lambda > 0) {
      double sign = config_.entropy_sign == EntropySign::kBalance ? 1.0 : -1.0;
      for (int a = 0; a < latency; ++a) {
        double occupancy = 0.0;
        for (int v = 0; v < n; ++v) occupancy += rec.soft[v * latency + a];
        if (occupancy <= 0) continue;
        double d = sign * config_.lambda * (std::log(occupancy / n) + 1.0) / n;
        for (int v = 0; v < n; ++v) {
          if (rec.mask[v * latency + a]) dsoft[v * latency + a] += d;
        }
      }
    }

    const double wsum = dag_.total_edge_weight();
    if (wsum > 0 && latency > 1) {
      std::vector<double> cum(rec.soft.size());
      for (int v = 0; v < n; ++v) {
        double run = 0.0;
        for (int a = 0; a < latency; ++a) {
          run += rec.soft[v * latency + a];
          cum[v * latency + a] = run;
        }
      }
      // dL_c/dF, then suffix sums turn dF into dsoft.
      std::vector<double> dcum(rec.soft.size(), 0.0);
      for (const Edge& e : dag_.edges()) {
        for (int a = 0; a + 1 < latency; ++a) {
          dcum[e.src * latency + a] +=
              e.weight * (1.0 - cum[e.dst * latency + a]) / wsum;
          dcum[e.dst * latency + a] -= e.weight * cum[e.src * latency + a] / wsum;
        }
      }
      for (int v = 0; v < n; ++v) {
        double suffix = 0.0;
        for (int a = latency - 1; a >= 0; --a) {
          if (a + 1 < latency) suffix += dcum[v * latency + a];
          if (rec.mask[v * latency + a]) dsoft[v * latency + a] += suffix;
        }
      }
    }

    std::vector<double> grad(rec.soft.size(), 0.0);
    for (int v = 0; v < n; ++v) {
      double dot = 0.0;
      for (int a = 0; a < latency; ++a) {
        dot += rec.soft[v * latency + a] * dsoft[v * latency + a];
      }
      for (int a = 0; a < latency; ++a) {
        if (!rec.mask[v * latency + a]) continue;
        grad[v * latency + a] = rec.soft[v * latency + a] *
                                (dsoft[v * latency + a] - dot) / rec.tau;
      }
    }
    return grad;
  }

  /// Adam update from one record's gradient.
  void step(const IterationRecord& rec) {
    std::vector<double> grad = gradient(rec);
    for (std::size_t i = 0; i < grad.size(); ++i) {
      if (!std::isfinite(grad[i])) {
        throw SolverError(
            "non-finite gradient at iteration " +
            std::to_string(rec.iteration) + ", node " +
            std::to_string(i / latency_) + ", stage " +
            std::to_string(i % latency_) + " (loss_r=" +
            fmt_double(rec.loss_resource) + ", loss_c=" +
            fmt_double(rec.loss_comm) + ")");
      }
    }
    ++steps_;
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    double c1 = 1.0 - std::pow(b1, steps_);
    double c2 = 1.0 - std::pow(b2, steps_);
    for (std::size_t i = 0; i < grad.size(); ++i) {
      adam_m_[i] = b1 * adam_m_[i] + (1.0 - b1) * grad[i];
      adam_v_[i] = b2 * adam_v_[i] + (1.0 - b2) * grad[i] * grad[i];
      double mhat = adam_m_[i] / c1;
      double vhat = adam_v_[i] / c2;
      logits_[i] -= config_.learning_rate * mhat / (std::sqrt(vhat) + eps);
    }
  }

  /// Runs the configured number of iterations, one record per iteration.
  std::vector<IterationRecord> run() {
    std::vector<IterationRecord> records;
    records.reserve(config_.iterations);
    for (int k = 0; k < config_.iterations; ++k) {
      auto t0 = std::chrono::steady_clock::now();
      IterationRecord rec = forward_pass();
      step(rec);
      rec.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      records.push_back(std::move(rec));
    }
    return records;
  }

 private:
  std::vector<double> masked_softmax(const std::vector<double>& logits,
                                     int node,
                                     const std::vector<std::uint8_t>& support,
                                     const std::vector<double>* noise,
                                     double tau) const {
    std::vector<double> out(latency_, 0.0);
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < latency_; ++a) {
      if (!support[a]) continue;
      double z = logits[node * latency_ + a];
      if (noise) z += (*noise)[a];
      z /= tau;
      out[a] = z;
      best = std::max(best, z);
    }
    if (best == -std::numeric_limits<double>::infinity()) {
      throw SolverError("constrained sampling hit an empty stage mask at node " +
                        std::to_string(node));
    }
    double sum = 0.0;
    for (int a = 0; a < latency_; ++a) {
      if (!support[a]) continue;
      out[a] = std::exp(out[a] - best);
      sum += out[a];
    }
    for (int a = 0; a < latency_; ++a) {
      if (support[a]) out[a] /= sum;
    }
    return out;
  }

  SampleResult sample_with_noise(const std::vector<double>& logits, int node,
                                 const std::vector<std::uint8_t>& parent_mask,
                                 const std::vector<double>& noise, double tau) {
    std::vector<std::uint8_t> support(latency_);
    for (int a = 0; a < latency_; ++a) {
      support[a] = parent_mask[a] & window_mask_[node * latency_ + a];
    }
    SampleResult result;
    result.soft = masked_softmax(logits, node, support, &noise, tau);
    result.stage = 0;
    for (int a = 1; a < latency_; ++a) {
      if (result.soft[a] > result.soft[result.stage]) result.stage = a;
    }
    // Noise-free confidence: softmax over the window, then the parent mask
    // zeroes infeasible stages without renormalizing.
    std::vector<std::uint8_t> window(
        window_mask_.begin() + node * latency_,
        window_mask_.begin() + (node + 1) * latency_);
    result.probs = masked_softmax(logits, node, window, nullptr, 1.0);
    for (int a = 0; a < latency_; ++a) {
      if (!parent_mask[a]) result.probs[a] = 0.0;
    }
    return result;
  }

  Dag dag_;
  int latency_;
  DiffConfig config_;
  SplitRng rng_;
  std::vector<StageWindow> windows_;
  std::vector<double> logits_;
  std::vector<double> adam_m_;
  std::vector<double> adam_v_;
  std::vector<std::uint8_t> window_mask_;
  int steps_ = 0;
};

/// Convenience wrapper: fresh optimizer, full run.
inline std::vector<IterationRecord> run_diffsched(const Dag& dag, int latency,
                                                  const DiffConfig& config) {
  DiffOptimizer opt(dag, latency, config);
  return opt.run();
}

}  // namespace hsched

#endif  // HSCHED_DIFFSCHED_HPP_
