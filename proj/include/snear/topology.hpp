// Copyright 2026 The snear Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SNEAR_TOPOLOGY_HPP
#define SNEAR_TOPOLOGY_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace snear {

enum class GraphKind { complete, ring, path, k_cyclic, erdos_renyi };

std::string to_string(GraphKind kind);
GraphKind parse_graph_kind(const std::string& name);

struct GraphSpec {
  GraphKind kind = GraphKind::ring;
  int n = 5;
  int k = 4;             // k_cyclic only
  double p_edge = 0.5;   // erdos_renyi only
  std::uint64_t seed = 0;
  int max_retries = 1000;
};

/// Undirected simple graph. Edges are stored once as (i, j) with i < j, sorted.
class Graph {
 public:
  Graph(int n, std::vector<std::pair<int, int>> edges,
        GraphKind kind = GraphKind::complete);

  int nodes() const { return n_; }
  GraphKind kind() const { return kind_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int i) const { return adj_[i]; }
  int degree(int i) const { return static_cast<int>(adj_[i].size()); }
  bool connected() const;
  bool has_edge(int i, int j) const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  int n_;
  GraphKind kind_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adj_;
};

Graph build_graph(const GraphSpec& spec);

/// Symmetric doubly stochastic matrix with graph sparsity, plus its spectrum.
/// Immutable once built; beta is computed at construction.
class ConsensusMatrix {
 public:
  /// Validates symmetry, stochasticity (1e-12) and spectrum.
  explicit ConsensusMatrix(Eigen::MatrixXd w);

  int nodes() const { return static_cast<int>(w_.rows()); }
  const Eigen::MatrixXd& matrix() const { return w_; }
  double operator()(int i, int j) const { return w_(i, j); }
  /// Descending: lambda_1 = 1 >= lambda_2 >= ... >= lambda_n.
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  double beta() const { return beta_; }
  /// Off-diagonal support of row i, ascending.
  const std::vector<int>& support(int i) const { return support_[i]; }

 private:
  Eigen::MatrixXd w_;
  std::vector<double> eigenvalues_;
  double beta_ = 0.0;
  std::vector<std::vector<int>> support_;
};

ConsensusMatrix metropolis_weights(const Graph& g);

/// beta = max(|lambda_2|, |lambda_n|). Throws ErrorCode::invariant if the
/// matrix is not symmetric.
double spectral_beta(const Eigen::MatrixXd& w);
std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& w);

/// Plain text, one "i j w" triple per line at 17 significant digits. Graphs use
/// w = 1 per edge; matrices list every nonzero entry.
void write_graph(std::ostream& os, const Graph& g);
Graph read_graph(std::istream& is, int n = -1);
void write_weights(std::ostream& os, const ConsensusMatrix& w);
ConsensusMatrix read_weights(std::istream& is);

}  // namespace snear

#endif  // SNEAR_TOPOLOGY_HPP
