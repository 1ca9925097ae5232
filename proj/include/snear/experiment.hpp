// Copyright 2026 The snear Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SNEAR_EXPERIMENT_HPP
#define SNEAR_EXPERIMENT_HPP

#include <memory>
#include <string>
#include <vector>

#include "snear/analysis.hpp"
#include "snear/config.hpp"

namespace snear {

enum class Mode { run, sweep, compare, bounds };
std::string to_string(Mode m);
Mode parse_mode(const std::string& s);

/// A fully built problem instance: graph, weights, objective and its solution.
struct Problem {
  GraphSpec graph_spec;
  Graph graph;
  ConsensusMatrix weights;
  std::shared_ptr<const Objective> objective;
  GroundTruth truth;
};

std::shared_ptr<const Objective> build_objective(const ObjectiveSpec& spec, int n);
/// Ground truth is read from, or written to, cache_dir keyed by the objective
/// fingerprint. An empty cache_dir disables caching.
Problem build_problem(const ObjectiveSpec& ospec, const GraphSpec& gspec,
                      const std::string& cache_dir);

struct RunSummary {
  std::uint64_t seed = 0;
  TraceStatus status = TraceStatus::max_iters;
  int iterations = 0;
  int termination_k = -1;
  double steady_err = 0.0;   // err_sq over the tail window
  double steady_fval = 0.0;  // fval_rel_err over the tail window
  long long communications = 0;  // at termination (or at the end)
  long long computations = 0;
  std::vector<double> costs;     // one per configured price pair
  std::string trace_path;
};

struct MethodReport {
  std::string name;
  AlgoConfig algo;
  std::vector<RunSummary> runs;
  SampleSummary steady_err;
  SampleSummary steady_fval;
  double median_steps = 0.0;
  std::vector<double> median_costs;
  int diverged = 0;
  TheoryConstants constants;
  std::vector<NeighborhoodBound> bounds;
  /// err_sq per seed and iteration; kept only in compare mode.
  std::vector<std::vector<double>> err_series;
};

struct CellReport {
  std::string label;
  GraphKind kind = GraphKind::ring;
  int n = 0;
  int t = 0;      // sweep value, 0 when not swept
  int delta = 0;  // sweep value, 0 when not swept
  double beta = 0.0;
  std::vector<MethodReport> methods;
};

struct ExperimentReport {
  ExperimentConfig config;
  Mode mode = Mode::run;
  std::vector<CellReport> cells;
  std::vector<std::string> warnings;
};

/// Runs every (cell, method, seed) combination; traces go to
/// <output_dir>/traces per the trace policy. Deterministic for a given config.
ExperimentReport run_experiment(const ExperimentConfig& cfg, Mode mode);

/// Runs one configured method on a prepared problem.
RunTrace run_trace(const Problem& problem, const AlgoConfig& algo, std::uint64_t seed,
                   const RunOptions& init, double epsilon, bool stop_on_termination);

enum class PlotKind { error_series, scaling };
/// error_series: k and the median err_sq per method (fig1.csv).
/// scaling: network_type, n, t, method, steady errors, steps and costs (fig2.csv).
void emit_plot_data(const ExperimentReport& report, PlotKind kind, const std::string& path);

/// summary.txt, bounds.txt and the plot files that apply to the mode.
void write_report(const ExperimentReport& report);
std::string summary_text(const ExperimentReport& report);
std::string bounds_text(const ExperimentReport& report);

/// Worker threads for sweeps: SNEAR_WORKERS, else the hardware concurrency.
int worker_count();

}  // namespace snear

#endif  // SNEAR_EXPERIMENT_HPP
