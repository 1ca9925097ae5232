// Copyright 2026 The snear Authors
// SPDX-License-Identifier: Apache-2.0

#include "snear/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "snear/error.hpp"
#include "snear/rng.hpp"

namespace snear {

ConvexityConstants ConvexityConstants::from_nodes(std::vector<double> mu_i,
                                                  std::vector<double> L_i) {
  if (mu_i.empty() || mu_i.size() != L_i.size())
    fail(ErrorCode::parameter, "convexity constants need one (mu, L) pair per node");
  for (std::size_t i = 0; i < mu_i.size(); ++i)
    if (!(mu_i[i] > 0.0) || !(L_i[i] >= mu_i[i]))
      fail(ErrorCode::invariant, "node " + std::to_string(i) + " violates 0 < mu_i <= L_i");
  ConvexityConstants c;
  const double n = static_cast<double>(mu_i.size());
  c.mu = *std::min_element(mu_i.begin(), mu_i.end());
  c.L = *std::max_element(L_i.begin(), L_i.end());
  c.mu_bar = std::accumulate(mu_i.begin(), mu_i.end(), 0.0) / n;
  c.L_bar = std::accumulate(L_i.begin(), L_i.end(), 0.0) / n;
  c.kappa = c.L / c.mu;
  c.gamma_bar = c.mu_bar * c.L_bar / (c.mu_bar + c.L_bar);
  c.mu_i = std::move(mu_i);
  c.L_i = std::move(L_i);
  return c;
}

std::size_t Objective::shard_size(int) const {
  fail(ErrorCode::unsupported, "objective has no sample shards");
}

Vec Objective::sample_gradient(int, const Vec&, std::span<const std::size_t>) const {
  fail(ErrorCode::unsupported, "mini-batch gradients need a data-backed objective");
}

double Objective::total_value(const Vec& x) const {
  double s = 0.0;
  for (int i = 0; i < n_; ++i) s += value(i, x);
  return s;
}

Vec Objective::total_gradient(const Vec& x) const {
  Vec g = Vec::Zero(p_);
  for (int i = 0; i < n_; ++i) g += gradient(i, x);
  return g;
}

Mat Objective::total_hessian(const Vec& x) const {
  Mat h = Mat::Zero(p_, p_);
  for (int i = 0; i < n_; ++i) h += hessian(i, x);
  return h;
}

// ---------------------------------------------------------------------------
// Quadratic

QuadraticObjective::QuadraticObjective(std::vector<Mat> a, std::vector<Vec> b)
    : Objective(static_cast<int>(a.size()), a.empty() ? 0 : static_cast<int>(a[0].rows())),
      a_(std::move(a)),
      b_(std::move(b)) {
  if (a_.empty() || a_.size() != b_.size())
    fail(ErrorCode::parameter, "quadratic needs one (A_i, b_i) pair per node");
  std::vector<double> mu_i, L_i;
  for (std::size_t i = 0; i < a_.size(); ++i) {
    if (a_[i].rows() != dim() || a_[i].cols() != dim() || b_[i].size() != dim())
      fail(ErrorCode::parameter, "quadratic blocks have inconsistent dimensions");
    if ((a_[i] - a_[i].transpose()).cwiseAbs().maxCoeff() > 0.0)
      fail(ErrorCode::parameter, "A_i must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat> es(a_[i], Eigen::EigenvaluesOnly);
    mu_i.push_back(es.eigenvalues().minCoeff());
    L_i.push_back(es.eigenvalues().maxCoeff());
    if (!(mu_i.back() > 0.0))
      fail(ErrorCode::parameter, "A_i must be positive definite");
  }
  set_constants(ConvexityConstants::from_nodes(std::move(mu_i), std::move(L_i)));
}

double QuadraticObjective::value(int node, const Vec& x) const {
  return 0.5 * x.dot(a_[node] * x) + b_[node].dot(x);
}

Vec QuadraticObjective::gradient(int node, const Vec& x) const {
  return a_[node] * x + b_[node];
}

Mat QuadraticObjective::hessian(int node, const Vec&) const { return a_[node]; }

Vec QuadraticObjective::minimizer() const {
  Mat a = Mat::Zero(dim(), dim());
  Vec b = Vec::Zero(dim());
  for (int i = 0; i < nodes(); ++i) {
    a += a_[i];
    b += b_[i];
  }
  return -a.ldlt().solve(b);
}

Vec QuadraticObjective::node_minimizer(int node) const {
  return -a_[node].ldlt().solve(b_[node]);
}

std::string QuadraticObjective::fingerprint() const {
  // FNV-1a over the raw coefficients.
  std::uint64_t h = 1469598103934665603ULL;
  auto eat = [&h](const double* p, Eigen::Index count) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(p);
    for (Eigen::Index k = 0; k < count * static_cast<Eigen::Index>(sizeof(double)); ++k) {
      h ^= bytes[k];
      h *= 1099511628211ULL;
    }
  };
  for (int i = 0; i < nodes(); ++i) {
    eat(a_[i].data(), a_[i].size());
    eat(b_[i].data(), b_[i].size());
  }
  std::ostringstream os;
  os << "quadratic-n" << nodes() << "-p" << dim() << "-" << std::hex << h;
  return os.str();
}

std::shared_ptr<QuadraticObjective> make_quadratic(int n, int p,
                                                   const QuadraticSpec& spec,
                                                   std::uint64_t seed) {
  if (n < 1 || p < 1) fail(ErrorCode::parameter, "quadratic needs n >= 1 and p >= 1");
  if (!(spec.mu > 0.0)) fail(ErrorCode::parameter, "requested mu must be positive");
  if (!(spec.L >= spec.mu)) fail(ErrorCode::parameter, "requested L must be >= mu");

  RngStream shared(seed, StreamKey{Purpose::objective, 0xFFFF, 0, 0});
  Vec center(p);
  for (int k = 0; k < p; ++k) center[k] = spec.b_scale * shared.normal();

  std::vector<Mat> a;
  std::vector<Vec> b;
  for (int i = 0; i < n; ++i) {
    if (spec.identical && i > 0) {
      a.push_back(a[0]);
      b.push_back(b[0]);
      continue;
    }
    RngStream rng(seed, StreamKey{Purpose::objective, static_cast<std::uint64_t>(i), 0, 0});
    Mat g(p, p);
    for (int r = 0; r < p; ++r)
      for (int c = 0; c < p; ++c) g(r, c) = rng.normal();
    Mat q = Eigen::HouseholderQR<Mat>(g).householderQ();
    Vec spectrum(p);
    for (int k = 0; k < p; ++k) spectrum[k] = spec.mu + (spec.L - spec.mu) * rng.uniform();
    Mat ai = q * spectrum.asDiagonal() * q.transpose();
    ai = 0.5 * (ai + ai.transpose()).eval();
    Vec bi(p);
    if (spec.shared_minimizer) {
      bi = -ai * center;
    } else {
      for (int k = 0; k < p; ++k) bi[k] = spec.b_scale * rng.normal();
    }
    a.push_back(std::move(ai));
    b.push_back(std::move(bi));
  }
  return std::make_shared<QuadraticObjective>(std::move(a), std::move(b));
}

// ---------------------------------------------------------------------------
// Logistic regression

namespace {

double softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double row_dot(const Dataset& d, int s, const Vec& x) {
  double z = 0.0;
  for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(d.features, s); it; ++it)
    z += it.value() * x[it.col()];
  return z;
}

void row_axpy(const Dataset& d, int s, double scale, Vec& out) {
  for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(d.features, s); it; ++it)
    out[it.col()] += scale * it.value();
}

}  // namespace

LogisticObjective::LogisticObjective(std::shared_ptr<const Dataset> data, int n,
                                     std::uint64_t shard_seed)
    : Objective(n, data ? data->dim() : 0),
      data_(std::move(data)),
      shard_seed_(shard_seed) {
  if (!data_ || data_->samples() == 0) fail(ErrorCode::parameter, "empty dataset");
  const int m = data_->samples();
  if (n < 1 || n > m) fail(ErrorCode::parameter, "need 1 <= n <= number of samples");
  reg_ = 1.0 / m;

  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  RngStream rng(shard_seed, StreamKey{Purpose::shuffle, 0, 0, 0});
  std::shuffle(order.begin(), order.end(), rng);
  shards_.resize(n);
  const int base = m / n, extra = m % n;
  int cursor = 0;
  for (int i = 0; i < n; ++i) {
    const int size = base + (i < extra ? 1 : 0);
    if (size == 0) fail(ErrorCode::parameter, "empty shard");
    shards_[i].assign(order.begin() + cursor, order.begin() + cursor + size);
    cursor += size;
  }

  std::vector<double> mu_i(n, 2.0 * reg_), L_i(n);
  for (int i = 0; i < n; ++i) {
    Mat gram = Mat::Zero(dim(), dim());
    for (int s : shards_[i]) {
      Vec row = Vec::Zero(dim());
      row_axpy(*data_, s, 1.0, row);
      gram.selfadjointView<Eigen::Lower>().rankUpdate(row);
    }
    gram = gram.selfadjointView<Eigen::Lower>();
    Eigen::SelfAdjointEigenSolver<Mat> es(gram, Eigen::EigenvaluesOnly);
    L_i[i] = es.eigenvalues().maxCoeff() / (4.0 * shards_[i].size()) + 2.0 * reg_;
  }
  set_constants(ConvexityConstants::from_nodes(std::move(mu_i), std::move(L_i)));
}

double LogisticObjective::value(int node, const Vec& x) const {
  double s = 0.0;
  for (int idx : shards_[node]) s += softplus(-data_->labels[idx] * row_dot(*data_, idx, x));
  return s / shards_[node].size() + reg_ * x.squaredNorm();
}

Vec LogisticObjective::gradient(int node, const Vec& x) const {
  Vec g = Vec::Zero(dim());
  for (int idx : shards_[node]) {
    const double b = data_->labels[idx];
    row_axpy(*data_, idx, -b * sigmoid(-b * row_dot(*data_, idx, x)), g);
  }
  g /= static_cast<double>(shards_[node].size());
  g += 2.0 * reg_ * x;
  return g;
}

Mat LogisticObjective::hessian(int node, const Vec& x) const {
  Mat h = Mat::Zero(dim(), dim());
  for (int idx : shards_[node]) {
    const double s = sigmoid(row_dot(*data_, idx, x));
    Vec row = Vec::Zero(dim());
    row_axpy(*data_, idx, 1.0, row);
    h.selfadjointView<Eigen::Lower>().rankUpdate(row, s * (1.0 - s));
  }
  h = h.selfadjointView<Eigen::Lower>();
  h /= static_cast<double>(shards_[node].size());
  h.diagonal().array() += 2.0 * reg_;
  return h;
}

Vec LogisticObjective::sample_gradient(int node, const Vec& x,
                                       std::span<const std::size_t> positions) const {
  if (positions.empty()) fail(ErrorCode::parameter, "empty mini-batch");
  Vec g = Vec::Zero(dim());
  for (std::size_t pos : positions) {
    const int idx = shards_[node].at(pos);
    const double b = data_->labels[idx];
    row_axpy(*data_, idx, -b * sigmoid(-b * row_dot(*data_, idx, x)), g);
  }
  g /= static_cast<double>(positions.size());
  g += 2.0 * reg_ * x;
  return g;
}

std::string LogisticObjective::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto eat = [&h](std::uint64_t v) {
    for (int k = 0; k < 8; ++k) {
      h ^= (v >> (8 * k)) & 0xFF;
      h *= 1099511628211ULL;
    }
  };
  const auto& f = data_->features;
  for (int r = 0; r < f.outerSize(); ++r)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(f, r); it; ++it) {
      eat(static_cast<std::uint64_t>(it.col()));
      double v = it.value();
      std::uint64_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      eat(bits);
    }
  for (Eigen::Index s = 0; s < data_->labels.size(); ++s) eat(data_->labels[s] > 0 ? 1 : 2);
  eat(shard_seed_);
  std::ostringstream os;
  os << "logistic-M" << data_->samples() << "-p" << dim() << "-n" << nodes() << "-"
     << std::hex << h;
  return os.str();
}

std::shared_ptr<LogisticObjective> make_logistic(std::shared_ptr<const Dataset> data,
                                                 int n, std::uint64_t shard_seed) {
  return std::make_shared<LogisticObjective>(std::move(data), n, shard_seed);
}

Dataset make_synthetic_dataset(int samples, int dim, std::uint64_t seed) {
  if (samples < 1 || dim < 1) fail(ErrorCode::parameter, "synthetic data needs M, p >= 1");
  RngStream teacher_rng(seed, StreamKey{Purpose::objective, 0, 1, 0});
  Vec teacher(dim);
  for (int k = 0; k < dim; ++k) teacher[k] = teacher_rng.normal();
  teacher /= std::sqrt(static_cast<double>(dim));

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(samples) * dim);
  Dataset d;
  d.labels.resize(samples);
  for (int s = 0; s < samples; ++s) {
    RngStream rng(seed, StreamKey{Purpose::objective, static_cast<std::uint64_t>(s), 2, 0});
    double z = 0.0;
    for (int k = 0; k < dim; ++k) {
      const double v = rng.normal();
      entries.emplace_back(s, k, v);
      z += v * teacher[k];
    }
    d.labels[s] = rng.uniform() < sigmoid(2.0 * z) ? 1.0 : -1.0;
  }
  d.features.resize(samples, dim);
  d.features.setFromTriplets(entries.begin(), entries.end());
  d.features.makeCompressed();
  return d;
}

// ---------------------------------------------------------------------------
// Centralized solution

namespace {

template <class Value, class Grad, class Hess>
Vec newton(int p, Value f, Grad grad, Hess hess, double tol, const char* what) {
  Vec x = Vec::Zero(p);
  for (int iter = 0; iter < 200; ++iter) {
    Vec g = grad(x);
    const double gnorm = g.norm();
    if (gnorm <= tol) return x;
    Vec d = hess(x).ldlt().solve(g);
    const double fx = f(x);
    const double decrement = g.dot(d);
    double step = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
      Vec trial = x - step * d;
      const double ft = f(trial);
      if (ft <= fx - 1e-4 * step * decrement ||
          (ft <= fx + 1e-13 * std::abs(fx) && grad(trial).norm() < gnorm)) {
        x = std::move(trial);
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  if (grad(x).norm() <= tol) return x;
  fail(ErrorCode::convergence, std::string("centralized solve did not reach tolerance for ") +
                                   what + " (gradient norm " + std::to_string(grad(x).norm()) +
                                   ")");
}

}  // namespace

GroundTruth solve_centralized(const Objective& obj, double tol) {
  GroundTruth gt;
  if (const auto* q = dynamic_cast<const QuadraticObjective*>(&obj)) {
    gt.x_star = q->minimizer();
    for (int i = 0; i < obj.nodes(); ++i) gt.u_star.push_back(q->node_minimizer(i));
  } else {
    gt.x_star = newton(
        obj.dim(), [&](const Vec& x) { return obj.total_value(x); },
        [&](const Vec& x) { return obj.total_gradient(x); },
        [&](const Vec& x) { return obj.total_hessian(x); }, tol, "f");
    for (int i = 0; i < obj.nodes(); ++i)
      gt.u_star.push_back(newton(
          obj.dim(), [&](const Vec& x) { return obj.value(i, x); },
          [&](const Vec& x) { return obj.gradient(i, x); },
          [&](const Vec& x) { return obj.hessian(i, x); }, tol, "f_i"));
  }
  gt.f_star = obj.total_value(gt.x_star);
  return gt;
}

void write_ground_truth(std::ostream& os, const GroundTruth& gt) {
  os << std::setprecision(17);
  os << "f_star " << gt.f_star << '\n';
  os << "x_star " << gt.x_star.size();
  for (Eigen::Index k = 0; k < gt.x_star.size(); ++k) os << ' ' << gt.x_star[k];
  os << '\n';
  for (std::size_t i = 0; i < gt.u_star.size(); ++i) {
    os << "u_star " << gt.u_star[i].size();
    for (Eigen::Index k = 0; k < gt.u_star[i].size(); ++k) os << ' ' << gt.u_star[i][k];
    os << '\n';
  }
}

GroundTruth read_ground_truth(std::istream& is) {
  GroundTruth gt;
  std::string tag;
  bool have_f = false, have_x = false;
  while (is >> tag) {
    if (tag == "f_star") {
      if (!(is >> gt.f_star)) fail(ErrorCode::parse, "bad f_star");
      have_f = true;
    } else if (tag == "x_star" || tag == "u_star") {
      Eigen::Index p = 0;
      if (!(is >> p) || p < 0) fail(ErrorCode::parse, "bad vector length");
      Vec v(p);
      for (Eigen::Index k = 0; k < p; ++k)
        if (!(is >> v[k])) fail(ErrorCode::parse, "truncated vector");
      if (tag == "x_star") {
        gt.x_star = std::move(v);
        have_x = true;
      } else {
        gt.u_star.push_back(std::move(v));
      }
    } else {
      fail(ErrorCode::parse, "unknown ground-truth record '" + tag + "'");
    }
  }
  if (!have_f || !have_x) fail(ErrorCode::parse, "ground-truth file is incomplete");
  return gt;
}

}  // namespace snear
