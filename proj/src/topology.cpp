// Copyright 2026 The snear Authors
// SPDX-License-Identifier: Apache-2.0

#include "snear/topology.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>

#include "snear/error.hpp"
#include "snear/rng.hpp"

namespace snear {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::parameter: return "parameter error";
    case ErrorCode::generation: return "generation error";
    case ErrorCode::numeric: return "numeric error";
    case ErrorCode::parse: return "parse error";
    case ErrorCode::convergence: return "convergence error";
    case ErrorCode::unsupported: return "unsupported operator";
    case ErrorCode::invariant: return "invariant violation";
    case ErrorCode::config: return "configuration error";
    case ErrorCode::io: return "i/o error";
  }
  return "error";
}

std::string to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::complete: return "complete";
    case GraphKind::ring: return "ring";
    case GraphKind::path: return "path";
    case GraphKind::k_cyclic: return "k_cyclic";
    case GraphKind::erdos_renyi: return "erdos_renyi";
  }
  return "?";
}

GraphKind parse_graph_kind(const std::string& name) {
  if (name == "complete") return GraphKind::complete;
  if (name == "ring") return GraphKind::ring;
  if (name == "path") return GraphKind::path;
  if (name == "k_cyclic" || name == "cyclic") return GraphKind::k_cyclic;
  if (name == "erdos_renyi" || name == "random") return GraphKind::erdos_renyi;
  fail(ErrorCode::parameter, "unknown graph kind '" + name + "'");
}

Graph::Graph(int n, std::vector<std::pair<int, int>> edges, GraphKind kind)
    : n_(n), kind_(kind) {
  if (n < 1) fail(ErrorCode::parameter, "graph needs at least one node");
  std::set<std::pair<int, int>> unique;
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n)
      fail(ErrorCode::parameter, "edge endpoint out of range");
    if (i == j) fail(ErrorCode::parameter, "self-loops are not allowed");
    unique.emplace(std::min(i, j), std::max(i, j));
  }
  edges_.assign(unique.begin(), unique.end());
  adj_.assign(n, {});
  for (auto [i, j] : edges_) {
    adj_[i].push_back(j);
    adj_[j].push_back(i);
  }
  for (auto& a : adj_) std::sort(a.begin(), a.end());
}

bool Graph::connected() const {
  std::vector<char> seen(n_, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int count = 1;
  while (!frontier.empty()) {
    int u = frontier.front();
    frontier.pop();
    for (int v : adj_[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        frontier.push(v);
      }
    }
  }
  return count == n_;
}

bool Graph::has_edge(int i, int j) const {
  const auto& a = adj_[i];
  return std::binary_search(a.begin(), a.end(), j);
}

namespace {

std::vector<std::pair<int, int>> circulant_edges(int n, int half_width) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int d = 1; d <= half_width; ++d) edges.emplace_back(i, (i + d) % n);
  return edges;
}

}  // namespace

Graph build_graph(const GraphSpec& spec) {
  const int n = spec.n;
  if (n < 2) fail(ErrorCode::parameter, "graph needs n >= 2");
  std::vector<std::pair<int, int>> edges;
  switch (spec.kind) {
    case GraphKind::complete:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
      break;
    case GraphKind::ring:
      edges = circulant_edges(n, 1);
      break;
    case GraphKind::path:
      for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
      break;
    case GraphKind::k_cyclic:
      if (spec.k < 2 || spec.k % 2 != 0 || spec.k >= n)
        fail(ErrorCode::parameter,
             "k_cyclic needs an even k with 2 <= k < n (got k=" +
                 std::to_string(spec.k) + ", n=" + std::to_string(n) + ")");
      edges = circulant_edges(n, spec.k / 2);
      break;
    case GraphKind::erdos_renyi: {
      if (!(spec.p_edge > 0.0 && spec.p_edge <= 1.0))
        fail(ErrorCode::parameter, "erdos_renyi needs 0 < p_edge <= 1");
      for (int attempt = 0; attempt < spec.max_retries; ++attempt) {
        RngStream rng(derive_seed(spec.seed, Purpose::graph,
                                  static_cast<std::uint64_t>(attempt)),
                      StreamKey{Purpose::graph, 0, 0, 0});
        edges.clear();
        for (int i = 0; i < n; ++i)
          for (int j = i + 1; j < n; ++j)
            if (rng.uniform() < spec.p_edge) edges.emplace_back(i, j);
        Graph g(n, edges, GraphKind::erdos_renyi);
        if (g.connected()) return g;
      }
      fail(ErrorCode::generation,
           "no connected Erdos-Renyi graph after " +
               std::to_string(spec.max_retries) + " draws");
    }
  }
  Graph g(n, std::move(edges), spec.kind);
  if (!g.connected()) fail(ErrorCode::generation, "generated graph is disconnected");
  return g;
}

std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& w) {
  if (w.rows() != w.cols())
    fail(ErrorCode::invariant, "consensus matrix must be square");
  if (w.size() > 0 && (w - w.transpose()).cwiseAbs().maxCoeff() > 0.0)
    fail(ErrorCode::invariant, "consensus matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(w, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    fail(ErrorCode::numeric, "eigen-decomposition failed");
  const Eigen::VectorXd& ev = solver.eigenvalues();  // ascending
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::reverse(out.begin(), out.end());
  return out;
}

double spectral_beta(const Eigen::MatrixXd& w) {
  auto ev = symmetric_eigenvalues(w);
  if (ev.size() < 2) return 0.0;
  return std::max(std::abs(ev[1]), std::abs(ev.back()));
}

ConsensusMatrix::ConsensusMatrix(Eigen::MatrixXd w) : w_(std::move(w)) {
  const Eigen::Index n = w_.rows();
  if (n < 1 || w_.cols() != n)
    fail(ErrorCode::invariant, "consensus matrix must be square and nonempty");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(w_.row(i).sum() - 1.0) > 1e-12)
      fail(ErrorCode::invariant, "row " + std::to_string(i) + " does not sum to 1");
    for (Eigen::Index j = 0; j < n; ++j)
      if (w_(i, j) < 0.0) fail(ErrorCode::invariant, "negative consensus weight");
  }
  eigenvalues_ = symmetric_eigenvalues(w_);
  beta_ = n < 2 ? 0.0
                : std::max(std::abs(eigenvalues_[1]), std::abs(eigenvalues_.back()));
  if (!(beta_ < 1.0 - 1e-12))
    fail(ErrorCode::invariant, "beta >= 1: graph disconnected or lambda_n = -1");
  support_.assign(n, {});
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && w_(i, j) != 0.0) support_[i].push_back(static_cast<int>(j));
}

ConsensusMatrix metropolis_weights(const Graph& g) {
  const int n = g.nodes();
  if (!g.connected()) fail(ErrorCode::parameter, "metropolis weights need a connected graph");
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (auto [i, j] : g.edges()) {
    double wij = 1.0 / (1.0 + std::max(g.degree(i), g.degree(j)));
    w(i, j) = wij;
    w(j, i) = wij;
  }
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j : g.neighbors(i)) off += w(i, j);
    w(i, i) = 1.0 - off;
  }
  return ConsensusMatrix(std::move(w));
}

namespace {

void write_triple(std::ostream& os, int i, int j, double v) {
  os << i << ' ' << j << ' ' << std::setprecision(17) << v << '\n';
}

struct Triple {
  int i, j;
  double w;
};

std::vector<Triple> read_triples(std::istream& is) {
  std::vector<Triple> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    Triple t{};
    if (!(ss >> t.i >> t.j >> t.w))
      fail(ErrorCode::parse, "line " + std::to_string(lineno) + ": expected 'i j w'");
    out.push_back(t);
  }
  return out;
}

}  // namespace

void write_graph(std::ostream& os, const Graph& g) {
  for (auto [i, j] : g.edges()) write_triple(os, i, j, 1.0);
}

Graph read_graph(std::istream& is, int n) {
  auto triples = read_triples(is);
  std::vector<std::pair<int, int>> edges;
  int max_index = -1;
  for (const auto& t : triples) {
    edges.emplace_back(t.i, t.j);
    max_index = std::max({max_index, t.i, t.j});
  }
  return Graph(n > 0 ? n : max_index + 1, std::move(edges));
}

void write_weights(std::ostream& os, const ConsensusMatrix& w) {
  const auto& m = w.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) write_triple(os, static_cast<int>(i), static_cast<int>(j), m(i, j));
}

ConsensusMatrix read_weights(std::istream& is) {
  auto triples = read_triples(is);
  int n = 0;
  for (const auto& t : triples) n = std::max({n, t.i + 1, t.j + 1});
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (const auto& t : triples) {
    if (t.i < 0 || t.j < 0) fail(ErrorCode::parse, "negative index in weights file");
    m(t.i, t.j) = t.w;
  }
  return ConsensusMatrix(std::move(m));
}

}  // namespace snear
