// Copyright 2026 The snear Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SNEAR_OBJECTIVES_HPP
#define SNEAR_OBJECTIVES_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace snear {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Per-node strong convexity / smoothness constants and their aggregates.
struct ConvexityConstants {
  std::vector<double> mu_i;
  std::vector<double> L_i;
  double mu = 0.0;        // min_i mu_i
  double L = 0.0;         // max_i L_i
  double mu_bar = 0.0;    // mean of mu_i
  double L_bar = 0.0;     // mean of L_i
  double kappa = 0.0;     // L / mu
  double gamma_bar = 0.0; // mu_bar L_bar / (mu_bar + L_bar)

  static ConvexityConstants from_nodes(std::vector<double> mu_i,
                                       std::vector<double> L_i);
};

/// f(x) = sum_i f_i(x), with f_i private to node i.
class Objective {
 public:
  virtual ~Objective() = default;

  int nodes() const { return n_; }
  int dim() const { return p_; }
  const ConvexityConstants& constants() const { return constants_; }

  virtual double value(int node, const Vec& x) const = 0;
  virtual Vec gradient(int node, const Vec& x) const = 0;
  virtual Mat hessian(int node, const Vec& x) const = 0;

  /// Mini-batch support; only data-backed objectives override these.
  virtual bool data_backed() const { return false; }
  virtual std::size_t shard_size(int node) const;
  /// Gradient averaged over the given shard-local sample positions.
  virtual Vec sample_gradient(int node, const Vec& x,
                              std::span<const std::size_t> positions) const;

  /// Stable description used as a cache key.
  virtual std::string fingerprint() const = 0;

  double total_value(const Vec& x) const;
  Vec total_gradient(const Vec& x) const;
  Mat total_hessian(const Vec& x) const;

 protected:
  Objective(int n, int p) : n_(n), p_(p) {}
  void set_constants(ConvexityConstants c) { constants_ = std::move(c); }

 private:
  int n_;
  int p_;
  ConvexityConstants constants_;
};

/// f_i(x) = 0.5 x'A_i x + b_i'x.
class QuadraticObjective final : public Objective {
 public:
  QuadraticObjective(std::vector<Mat> a, std::vector<Vec> b);

  double value(int node, const Vec& x) const override;
  Vec gradient(int node, const Vec& x) const override;
  Mat hessian(int node, const Vec& x) const override;
  std::string fingerprint() const override;

  const Mat& a(int node) const { return a_[node]; }
  const Vec& b(int node) const { return b_[node]; }
  /// -(sum A_i)^{-1} (sum b_i)
  Vec minimizer() const;
  /// -A_i^{-1} b_i
  Vec node_minimizer(int node) const;

 private:
  std::vector<Mat> a_;
  std::vector<Vec> b_;
};

struct QuadraticSpec {
  double mu = 1.0;        // smallest curvature any node may have
  double L = 10.0;        // largest curvature any node may have
  double b_scale = 1.0;
  bool identical = false; // replicate node 0's function on every node
  bool shared_minimizer = false;  // b_i = -A_i c for one random c
};

std::shared_ptr<QuadraticObjective> make_quadratic(int n, int p,
                                                   const QuadraticSpec& spec,
                                                   std::uint64_t seed);

/// Sparse classification data with labels in {-1, +1}.
struct Dataset {
  Eigen::SparseMatrix<double, Eigen::RowMajor> features;  // M x p
  Vec labels;
  int samples() const { return static_cast<int>(features.rows()); }
  int dim() const { return static_cast<int>(features.cols()); }
};

/// Raw label text -> {-1, +1}. Empty map accepts only -1/+1 (and "+1").
using LabelMap = std::map<std::string, double>;
LabelMap parse_label_map(const std::string& text);  // "1:1,2:-1"

/// LIBSVM "label idx:val ..." with 1-based indices; idx k lands in column k-1
/// and the dimension is the largest index seen.
Dataset parse_libsvm(std::istream& is, const LabelMap& labels = {});
Dataset load_libsvm(const std::string& path, const LabelMap& labels = {});

/// Gaussian features, labels from a noisy logistic teacher.
Dataset make_synthetic_dataset(int samples, int dim, std::uint64_t seed);

/// f_i(x) = (1/|S_i|) sum_{s in S_i} log(1 + exp(-b_s <A_s, x>)) + (1/M)||x||^2
class LogisticObjective final : public Objective {
 public:
  LogisticObjective(std::shared_ptr<const Dataset> data, int n,
                    std::uint64_t shard_seed);

  double value(int node, const Vec& x) const override;
  Vec gradient(int node, const Vec& x) const override;
  Mat hessian(int node, const Vec& x) const override;
  std::string fingerprint() const override;

  bool data_backed() const override { return true; }
  std::size_t shard_size(int node) const override { return shards_[node].size(); }
  Vec sample_gradient(int node, const Vec& x,
                      std::span<const std::size_t> positions) const override;

  const Dataset& data() const { return *data_; }
  const std::vector<int>& shard(int node) const { return shards_[node]; }

 private:
  std::shared_ptr<const Dataset> data_;
  std::vector<std::vector<int>> shards_;
  std::uint64_t shard_seed_;
  double reg_;  // 1/M
};

std::shared_ptr<LogisticObjective> make_logistic(std::shared_ptr<const Dataset> data,
                                                 int n, std::uint64_t shard_seed = 0);

struct GroundTruth {
  Vec x_star;
  double f_star = 0.0;
  std::vector<Vec> u_star;
};

/// Closed form for quadratics, damped Newton otherwise, to ||grad|| <= tol.
GroundTruth solve_centralized(const Objective& obj, double tol = 1e-12);

/// 17-significant-digit text: f_star, x_star, then each u_i*.
void write_ground_truth(std::ostream& os, const GroundTruth& gt);
GroundTruth read_ground_truth(std::istream& is);

}  // namespace snear

#endif  // SNEAR_OBJECTIVES_HPP
