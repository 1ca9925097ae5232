// Copyright 2026 The snear Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SNEAR_ALGORITHMS_HPP
#define SNEAR_ALGORITHMS_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "snear/objectives.hpp"
#include "snear/operators.hpp"
#include "snear/topology.hpp"

namespace snear {

/// One row per node, one column per coordinate.
using NodeBlock = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Method { snear_dgd, dgd, extra, diging };
/// How a node combines quantized messages (q) with its own state (x):
///   Q1: sum_l w_il q_l + (x_i - q_i)   error-corrected
///   Q2: sum_l w_il q_l
///   Q3: w_ii x_i + sum_{l in N_i} w_il q_l
enum class Variant { Q1, Q2, Q3 };

std::string to_string(Method m);
std::string to_string(Variant v);
Method parse_method(const std::string& s);
Variant parse_variant(const std::string& s);

/// Consensus rounds per iteration: t(k) = t, or t(k) = k when increasing.
struct Schedule {
  bool increasing = false;
  int t = 1;
  int rounds(int k) const { return increasing ? k : t; }
};

struct AlgoConfig {
  Method method = Method::snear_dgd;
  Schedule schedule;
  Variant variant = Variant::Q1;
  double alpha = 0.1;
  int max_iters = 1000;
  CommOperator comm;
  GradOperator grad;
  double divergence_threshold = 1e12;

  void validate() const;
};

/// min{2/(mu+L), 2/(mu_bar+L_bar)}; the theory needs alpha strictly below it.
double steplength_limit(const ConvexityConstants& c);
/// Empty when alpha satisfies the condition, otherwise a warning message.
std::optional<std::string> steplength_warning(const AlgoConfig& cfg,
                                              const ConvexityConstants& c);

struct AlgoState {
  NodeBlock x;         // x^{t(k)}_{i,k}
  NodeBlock y;         // y_{i,k}, the last local gradient step
  NodeBlock x_prev;    // EXTRA: x_{k-1}
  NodeBlock mix_prev;  // EXTRA: consensus of x_{k-1}
  NodeBlock g_prev;    // EXTRA, DIGing: previous gradient block
  NodeBlock s;         // DIGing: gradient tracker
  long long communications = 0;  // per node
  long long computations = 0;    // per node
  int k = 0;
  bool diverged = false;

  int nodes() const { return static_cast<int>(x.rows()); }
  int dim() const { return static_cast<int>(x.cols()); }
  Vec average() const { return x.colwise().mean().transpose(); }
};

struct StepReport {
  int k = 0;
  Vec x_bar;
  bool diverged = false;
};

/// One synchronous round over every node: q_i = T_c[x_i], keyed on
/// (comm, i, k, round), then the variant's update. Adds one communication.
void consensus_round(Variant variant, NodeBlock& x, const ConsensusMatrix& w,
                     const CommOperator& comm, std::uint64_t seed, int k, int round,
                     long long* communications = nullptr);

/// T_g applied on every node to the rows of x, keyed on (grad, i, k).
NodeBlock gradient_block(const Objective& obj, const GradOperator& op, const NodeBlock& x,
                         std::uint64_t seed, int k);

/// x = y = y0; method auxiliaries are set up as each recursion requires.
AlgoState initial_state(const AlgoConfig& cfg, const Objective& obj, const NodeBlock& y0,
                        std::uint64_t seed);

StepReport snear_dgd_step(AlgoState& state, const AlgoConfig& cfg, const ConsensusMatrix& w,
                          const Objective& obj, std::uint64_t seed);
StepReport dgd_step(AlgoState& state, const AlgoConfig& cfg, const ConsensusMatrix& w,
                    const Objective& obj, std::uint64_t seed);
StepReport extra_step(AlgoState& state, const AlgoConfig& cfg, const ConsensusMatrix& w,
                      const Objective& obj, std::uint64_t seed);
StepReport diging_step(AlgoState& state, const AlgoConfig& cfg, const ConsensusMatrix& w,
                       const Objective& obj, std::uint64_t seed);
StepReport step(AlgoState& state, const AlgoConfig& cfg, const ConsensusMatrix& w,
                const Objective& obj, std::uint64_t seed);

enum class InitKind { zero, gaussian };

struct RunOptions {
  InitKind init = InitKind::zero;
  double init_scale = 1.0;
};

/// y_0 per RunOptions; gaussian draws are keyed on (init, node).
NodeBlock initial_point(const RunOptions& opts, int n, int p, std::uint64_t seed);

class RunObserver {
 public:
  virtual ~RunObserver() = default;
  virtual void on_start(const AlgoState&, const Vec& /*x_bar*/) {}
  /// Return true to stop the run after this step.
  virtual bool on_step(const AlgoState&, const StepReport&) { return false; }
};

enum class RunStatus { max_iters, stopped, diverged };
std::string to_string(RunStatus s);

struct RunResult {
  RunStatus status = RunStatus::max_iters;
  int iterations = 0;
  AlgoState final_state;
};

/// Deterministic in (cfg, w, obj, seed, opts).
RunResult run(const AlgoConfig& cfg, const ConsensusMatrix& w, const Objective& obj,
              std::uint64_t seed, const RunOptions& opts = {}, RunObserver* observer = nullptr);

}  // namespace snear

#endif  // SNEAR_ALGORITHMS_HPP
