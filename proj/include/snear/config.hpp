// Copyright 2026 The snear Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SNEAR_CONFIG_HPP
#define SNEAR_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "snear/algorithms.hpp"
#include "snear/topology.hpp"

namespace snear {

/// Raw "key = value" entries. Lines starting with '#' are comments.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& is);
KeyValues parse_key_values_text(const std::string& text);
KeyValues load_key_values(const std::string& path);
std::string format_key_values(const KeyValues& kv);

struct ObjectiveSpec {
  enum class Kind { quadratic, logistic };
  Kind kind = Kind::quadratic;
  int p = 4;                  // quadratic dimension
  QuadraticSpec quadratic;
  std::uint64_t seed = 1;     // quadratic draw, synthetic data, shard shuffle
  std::string data_path;      // LIBSVM file; synthetic data when empty
  std::string label_map;
  int samples = 500;          // synthetic M
  int dim = 20;               // synthetic p
};

struct MethodSpec {
  std::string name;
  AlgoConfig algo;
};

enum class TracePolicy { all, first, none };

struct SweepGrid {
  std::vector<GraphKind> kinds;
  std::vector<int> sizes;
  std::vector<int> rounds;
  std::vector<int> deltas;
  bool empty() const { return kinds.empty() && sizes.empty() && rounds.empty() && deltas.empty(); }
};

struct ExperimentConfig {
  std::string name = "experiment";
  ObjectiveSpec objective;
  GraphSpec graph;
  std::vector<MethodSpec> methods;
  std::vector<std::uint64_t> seeds;
  double epsilon = 0.0;        // Welford tolerance, 0 disables the test
  bool stop_on_termination = false;
  int max_iters = 1000;
  int tail = 100;
  std::vector<std::pair<double, double>> prices{{1.0, 1.0}, {0.01, 1.0}};  // (c_c, c_g)
  std::string output_dir = "snear_out";
  TracePolicy traces = TracePolicy::all;
  RunOptions init;
  SweepGrid sweep;
  int variance_draws = 10000;  // minibatch sigma_g^2 estimate
};

/// Schema (dotted keys; lists are comma separated):
///   name, output.dir, output.traces = all|first|none
///   objective.kind = quadratic|logistic, objective.p, objective.mu, objective.L,
///   objective.b_scale, objective.identical, objective.shared_minimizer, objective.seed
///   data.path, data.label_map, data.samples, data.dim
///   graph.kind, graph.n, graph.k, graph.p_edge, graph.seed, graph.max_retries
///   seeds = 1,2,3   or   seeds.count + seeds.base
///   termination.epsilon, termination.max_iters, termination.stop
///   metrics.tail, cost.prices = c_c:c_g,...
///   init.kind = zero|gaussian, init.scale
///   alpha, variant, divergence.threshold, comm.kind|delta|sigma_c, grad.kind|sigma_g|batch|sigma_g_sq
///   methods = a,b,...   method.<a>.algo|t|schedule|variant|alpha and method.<a>.comm.* / .grad.*
///   sweep.kinds, sweep.n, sweep.t, sweep.delta
///   estimate.draws
ExperimentConfig resolve_config(const KeyValues& kv);

std::string to_string(TracePolicy p);

}  // namespace snear

#endif  // SNEAR_CONFIG_HPP
